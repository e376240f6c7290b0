#pragma once

#include <charconv>
#include <string>

namespace condent {

// Shortest decimal that parses back to the same double; locale independent.
inline std::string shortest(double x) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

}  // namespace condent
