#include "condent/spec_parse.hpp"

#include <charconv>
#include <cmath>
#include <map>
#include <optional>

#include "json.hpp"

#include "condent/errors.hpp"

namespace condent {

namespace {

using KeyValues = std::map<std::string, std::string, std::less<>>;

std::string quoted(std::string_view s) { return "'" + std::string(s) + "'"; }

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

// split on sep outside of () and []
std::vector<std::string_view> split_top(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    int depth = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const char c = s[i];
        if (c == '(' || c == '[') ++depth;
        if (c == ')' || c == ']') {
            if (--depth < 0) throw ParseError("unbalanced brackets in " + quoted(s));
        }
        if (c == sep && depth == 0) {
            out.push_back(s.substr(start, i - start));
            start = i + 1;
        }
    }
    if (depth != 0) throw ParseError("unbalanced brackets in " + quoted(s));
    out.push_back(s.substr(start));
    return out;
}

std::pair<std::string_view, std::string_view> split_key(std::string_view item) {
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected key=value, got " + quoted(item));
    const auto k = trim(item.substr(0, eq)), v = trim(item.substr(eq + 1));
    if (k.empty() || v.empty()) throw ParseError("empty key or value in " + quoted(item));
    return {k, v};
}

KeyValues key_values(std::string_view body, const std::vector<std::string_view>& allowed, std::string_view who) {
    KeyValues kv;
    if (trim(body).empty()) return kv;
    for (auto item : split_top(body, ',')) {
        const auto [k, v] = split_key(item);
        bool ok = false;
        for (auto a : allowed) ok = ok || a == k;
        if (!ok) throw ParseError(std::string(who) + ": unknown key " + quoted(k));
        if (!kv.emplace(std::string(k), std::string(v)).second)
            throw ParseError(std::string(who) + ": repeated key " + quoted(k));
    }
    return kv;
}

double need(const KeyValues& kv, std::string_view key, std::string_view who) {
    const auto it = kv.find(key);
    if (it == kv.end()) throw ParseError(std::string(who) + ": missing key " + quoted(key));
    return parse_number(it->second);
}

double need_or(const KeyValues& kv, std::string_view key, double fallback) {
    const auto it = kv.find(key);
    return it == kv.end() ? fallback : parse_number(it->second);
}

// "head(body)" -> body, or nullopt when s does not have that shape
std::optional<std::string_view> call_body(std::string_view s, std::string_view head) {
    s = trim(s);
    if (s.size() < head.size() + 2 || s.substr(0, head.size()) != head || s[head.size()] != '(' || s.back() != ')')
        return std::nullopt;
    const auto body = s.substr(head.size() + 1, s.size() - head.size() - 2);
    // the closing parenthesis must match the opening one
    int depth = 0;
    for (char c : body) {
        if (c == '(') ++depth;
        if (c == ')' && --depth < 0) return std::nullopt;
    }
    return body;
}

// leading key=value items named in keys, then the remainder verbatim
std::pair<KeyValues, std::string_view> prefix_keys(std::string_view body, const std::vector<std::string_view>& keys,
                                                   std::string_view who) {
    KeyValues kv;
    std::size_t pos = 0;
    for (;;) {
        const auto items = split_top(body.substr(pos), ',');
        if (items.size() < 2) break;
        const auto eq = items[0].find('=');
        if (eq == std::string_view::npos) break;
        const auto k = trim(items[0].substr(0, eq));
        bool listed = false;
        for (auto a : keys) listed = listed || a == k;
        if (!listed) break;
        const auto [key, v] = split_key(items[0]);
        if (!kv.emplace(std::string(key), std::string(v)).second)
            throw ParseError(std::string(who) + ": repeated key " + quoted(key));
        pos += items[0].size() + 1;
    }
    return {kv, trim(body.substr(pos))};
}

nlohmann::json parse_json(std::string_view s) {
    try {
        return nlohmann::json::parse(s);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("malformed array " + quoted(s) + ": " + e.what());
    }
}

double json_number(const nlohmann::json& j, std::string_view ctx) {
    if (!j.is_number()) throw ParseError("non-numeric entry in " + quoted(ctx));
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ParseError("non-finite entry in " + quoted(ctx));
    return v;
}

}  // namespace

double parse_number(std::string_view s) {
    s = trim(s);
    double v = 0.0;
    const auto* end = s.data() + s.size();
    const auto r = std::from_chars(s.data(), end, v);
    if (s.empty() || r.ec != std::errc() || r.ptr != end || !std::isfinite(v))
        throw ParseError("not a finite number: " + quoted(s));
    return v;
}

std::vector<double> parse_grid(std::string_view s) {
    std::vector<double> g;
    const auto parts = split_top(s, ':');
    if (parts.size() == 3) {
        const double lo = parse_number(parts[0]), hi = parse_number(parts[1]);
        const double cnt = parse_number(parts[2]);
        if (cnt < 1 || cnt != std::floor(cnt) || cnt > 1e6) throw ParseError("grid count must be a positive integer: " + quoted(s));
        const int n = static_cast<int>(cnt);
        if (n == 1 && lo != hi) throw ParseError("a one-point grid needs lo == hi: " + quoted(s));
        for (int i = 0; i < n; ++i) g.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
        if (n > 1) g.back() = hi;
    } else if (parts.size() == 1) {
        for (auto item : split_top(s, ',')) g.push_back(parse_number(item));
    } else {
        throw ParseError("grid must be v1,v2,... or lo:hi:count, got " + quoted(s));
    }
    for (std::size_t i = 1; i < g.size(); ++i)
        if (!(g[i] > g[i - 1])) throw ParseError("grid must be strictly increasing: " + quoted(s));
    return g;
}

Mat parse_matrix(std::string_view json) {
    const auto j = parse_json(json);
    if (!j.is_array() || j.empty()) throw ParseError("matrix must be a nonempty array of rows: " + quoted(json));
    const auto rows = j.size();
    if (!j[0].is_array() || j[0].empty()) throw ParseError("matrix rows must be nonempty arrays: " + quoted(json));
    const auto cols = j[0].size();
    Mat m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        if (!j[r].is_array() || j[r].size() != cols) throw ParseError("ragged matrix: " + quoted(json));
        for (std::size_t c = 0; c < cols; ++c) m(r, c) = json_number(j[r][c], json);
    }
    return m;
}

Vec parse_vector(std::string_view json) {
    const auto j = parse_json(json);
    if (!j.is_array() || j.empty()) throw ParseError("vector must be a nonempty array: " + quoted(json));
    Vec v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) v[i] = json_number(j[i], json);
    return v;
}

InputDistribution parse_distribution(std::string_view spec) {
    spec = trim(spec);
    if (auto body = call_body(spec, "affine")) {
        const auto [kv, base] = prefix_keys(*body, {"scale", "shift"}, "affine");
        if (base.empty()) throw ParseError("affine: missing base distribution in " + quoted(spec));
        return make_affine(parse_distribution(base), need(kv, "scale", "affine"), need_or(kv, "shift", 0.0));
    }
    const auto colon = spec.find(':');
    if (colon == std::string_view::npos) throw ParseError("distribution spec must be name:key=value,..., got " + quoted(spec));
    const auto name = trim(spec.substr(0, colon));
    const auto body = spec.substr(colon + 1);
    if (name == "gaussian") {
        const auto kv = key_values(body, {"mu", "var"}, name);
        return make_gaussian(need_or(kv, "mu", 0.0), need(kv, "var", name));
    }
    if (name == "betaprime") {
        const auto kv = key_values(body, {"alpha", "gamma"}, name);
        return make_beta_prime(need(kv, "alpha", name), need(kv, "gamma", name));
    }
    for (const auto& c : catalog_names()) {
        if (name != c) continue;
        const auto kv = key_values(body, {"var"}, name);
        return make_catalog(c, need(kv, "var", name));
    }
    throw ParseError("unknown distribution " + quoted(name));
}

ExpoFamily parse_family(std::string_view spec) {
    spec = trim(spec);
    const auto colon = spec.find(':');
    if (colon == std::string_view::npos) throw ParseError("family spec must be name:key=value, got " + quoted(spec));
    const auto name = trim(spec.substr(0, colon));
    const auto body = spec.substr(colon + 1);
    if (name == "gamma") return gamma_family(need(key_values(body, {"alpha"}, name), "alpha", name));
    if (name == "gaussian-base") return gaussian_base_family(need(key_values(body, {"var"}, name), "var", name));
    throw ParseError("unknown channel family " + quoted(name));
}

VectorInput parse_vector_input(std::string_view spec) {
    spec = trim(spec);
    if (auto body = call_body(spec, "prod")) {
        std::vector<InputDistribution> f;
        for (auto item : split_top(*body, ';')) f.push_back(parse_distribution(item));
        return VectorInput::product(std::move(f));
    }
    if (auto body = call_body(spec, "gauss")) {
        const auto kv = key_values(*body, {"mean", "cov"}, "gauss");
        const auto cov = kv.find("cov");
        if (cov == kv.end()) throw ParseError("gauss: missing key 'cov'");
        const Mat k = parse_matrix(cov->second);
        const auto mean = kv.find("mean");
        return VectorInput::gaussian(mean == kv.end() ? Vec::Zero(k.rows()) : parse_vector(mean->second), k);
    }
    if (auto body = call_body(spec, "linear")) {
        const auto [kv, rest] = prefix_keys(*body, {"L", "shift"}, "linear");
        const auto inner = call_body(rest, "prod");
        if (!inner) throw ParseError("linear: expected prod(...) after L and shift, got " + quoted(rest));
        const auto z = parse_vector_input(rest);
        const auto l = kv.find("L");
        if (l == kv.end()) throw ParseError("linear: missing key 'L'");
        const auto sh = kv.find("shift");
        return VectorInput(z.factors(), parse_matrix(l->second),
                           sh == kv.end() ? Vec::Zero(z.dim()) : parse_vector(sh->second));
    }
    throw ParseError("vector input must be prod(...), gauss(...) or linear(...), got " + quoted(spec));
}

VectorChannel parse_vector_channel(std::string_view spec) {
    spec = trim(spec);
    if (spec.substr(0, 4) != "vec:") throw ParseError("vector channel spec must start with 'vec:', got " + quoted(spec));
    const auto kv = key_values(spec.substr(4), {"n", "input", "A", "Kw"}, "vec");
    const double n = need(kv, "n", "vec");
    const auto in = kv.find("input");
    if (in == kv.end()) throw ParseError("vec: missing key 'input'");
    VectorInput input = parse_vector_input(in->second);
    if (n != input.dim()) throw ParseError("vec: n=" + kv.at("n") + " but the input has dimension " + std::to_string(input.dim()));
    const int d = input.dim();
    const auto a = kv.find("A"), kw = kv.find("Kw");
    return VectorChannel(std::move(input), a == kv.end() ? Mat::Identity(d, d) : parse_matrix(a->second),
                         kw == kv.end() ? Mat::Identity(d, d) : parse_matrix(kw->second));
}

}  // namespace condent
