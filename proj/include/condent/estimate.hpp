#pragma once

#include <cmath>
#include <initializer_list>
#include <string_view>

namespace condent {

enum class Method { quadrature, monte_carlo, analytic };

inline std::string_view to_string(Method m) {
    switch (m) {
        case Method::quadrature: return "quadrature";
        case Method::monte_carlo: return "monte-carlo";
        case Method::analytic: return "analytic";
    }
    return "?";
}

struct EstimateWithError {
    double value = 0.0;
    double abs_error = 0.0;
    Method method = Method::quadrature;

    static EstimateWithError exact(double v) { return {v, 0.0, Method::analytic}; }
};

// Comparison tolerance for a relation between several estimates:
// 3 x root-sum-square of their errors, never below 1e-6.
inline double combined_tolerance(std::initializer_list<double> errors, double floor = 1e-6) {
    double s = 0.0;
    for (double e : errors) s += e * e;
    double t = 3.0 * std::sqrt(s);
    return t > floor ? t : floor;
}

}  // namespace condent
