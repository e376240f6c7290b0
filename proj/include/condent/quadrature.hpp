#pragma once
// Gauss-Hermite tables and a globally adaptive Gauss-Kronrod (10/21) integrator.
//
// Infinite ends are handled by algebraic maps onto [0,1); finite outer ends can
// optionally use a quadratic map that absorbs (x-a)^(-1/2) type edge behaviour.
// The vector form integrates several functionals of one integrand in a single
// pass, which is how posterior moments are computed.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <queue>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "condent/errors.hpp"
#include "condent/estimate.hpp"

namespace condent {

enum class RuleKind { gauss_hermite, adaptive_interval };

struct QuadratureRule {
    RuleKind kind = RuleKind::gauss_hermite;
    std::vector<double> nodes;
    std::vector<double> weights;
    // log of each weight; for large Hermite orders the outermost weights
    // underflow in double while their logs stay finite.
    std::vector<double> log_weights;
};

inline constexpr int kDefaultHermiteOrder = 96;

// Physicists' rule: sum_i w_i f(x_i) ~ int f(x) exp(-x^2) dx.
QuadratureRule gauss_hermite(int order);

// Cached table, built once per order; safe to share between threads.
const QuadratureRule& gauss_hermite_table(int order = kDefaultHermiteOrder);

struct Interval {
    double lo;
    double hi;
};

struct IntegrationOptions {
    double abs_tol = 1e-10;
    double rel_tol = 0.0;
    std::vector<double> breakpoints;  // initial partition (kinks, scale landmarks)
    double tail_scale = 1.0;          // length scale of the maps on infinite ends
    bool sqrt_lo = false;             // quadratic map at a finite lower end
    bool sqrt_hi = false;             // quadratic map at a finite upper end
    int tail_power = 1;               // x ~ L*(u/(1-u))^p on infinite ends; 2 suits algebraic tails
    int max_intervals = 4000;
};

template <std::size_t N>
struct AdaptiveResult {
    std::array<double, N> value{};
    std::array<double, N> error{};
    int intervals = 0;
    bool converged = false;
};

namespace detail {

enum class MapKind { linear, sqrt_lo, sqrt_hi, smoothstep, right_inf, right_inf_sqrt, left_inf, left_inf_sqrt };

struct Piece {
    MapKind kind;
    double a;
    double b;
    int power = 1;
};

// x(u) and dx/du for u in (0,1).
inline double map_point(const Piece& p, double u, double L, double& jac) {
    const double w = p.b - p.a;
    switch (p.kind) {
        case MapKind::linear:
            jac = w;
            return p.a + w * u;
        case MapKind::sqrt_lo:
            jac = 2.0 * w * u;
            return p.a + w * u * u;
        case MapKind::sqrt_hi: {
            const double v = 1.0 - u;
            jac = 2.0 * w * v;
            return p.b - w * v * v;
        }
        case MapKind::smoothstep:
            jac = 6.0 * w * u * (1.0 - u);
            return p.a + w * u * u * (3.0 - 2.0 * u);
        case MapKind::right_inf: {
            const double v = 1.0 - u;
            const double t = u / v;
            if (p.power == 2) {
                jac = 2.0 * L * t / (v * v);
                return p.a + L * t * t;
            }
            jac = L / (v * v);
            return p.a + L * t;
        }
        case MapKind::right_inf_sqrt: {
            const double v = 1.0 - u;
            jac = L * u * (2.0 - u) / (v * v);
            return p.a + L * u * u / v;
        }
        case MapKind::left_inf: {
            const double t = (1.0 - u) / u;
            if (p.power == 2) {
                jac = 2.0 * L * t / (u * u);
                return p.b - L * t * t;
            }
            jac = L / (u * u);
            return p.b - L * t;
        }
        case MapKind::left_inf_sqrt: {
            const double v = 1.0 - u;
            jac = L * v * (1.0 + u) / (u * u);
            return p.b - L * v * v / u;
        }
    }
    jac = 0.0;
    return 0.0;
}

std::vector<Piece> make_pieces(Interval iv, const IntegrationOptions& opt);

template <std::size_t N>
struct Segment {
    int piece;
    double ua;
    double ub;
    std::array<double, N> val;
    std::array<double, N> err;
    double norm;
};

template <std::size_t N, class G>
void gk21(G& g, double ua, double ub, std::array<double, N>& res, std::array<double, N>& err) {
    using boost::math::quadrature::gauss;
    using boost::math::quadrature::gauss_kronrod;
    const auto& xgk = gauss_kronrod<double, 21>::abscissa();
    const auto& wgk = gauss_kronrod<double, 21>::weights();
    const auto& wg = gauss<double, 10>::weights();
    constexpr double eps = std::numeric_limits<double>::epsilon();
    constexpr double uflow = std::numeric_limits<double>::min();

    const double c = 0.5 * (ua + ub);
    const double h = 0.5 * (ub - ua);
    std::array<std::array<double, N>, 21> fv;
    fv[0] = g(c);
    for (int j = 1; j <= 10; ++j) {
        fv[2 * j - 1] = g(c - h * xgk[j]);
        fv[2 * j] = g(c + h * xgk[j]);
    }
    for (std::size_t k = 0; k < N; ++k) {
        double resk = wgk[0] * fv[0][k];
        double resg = 0.0;
        double resabs = wgk[0] * std::abs(fv[0][k]);
        for (int j = 1; j <= 10; ++j) {
            const double f1 = fv[2 * j - 1][k];
            const double f2 = fv[2 * j][k];
            resk += wgk[j] * (f1 + f2);
            resabs += wgk[j] * (std::abs(f1) + std::abs(f2));
            if (j % 2 == 1) resg += wg[(j - 1) / 2] * (f1 + f2);
        }
        const double reskh = 0.5 * resk;
        double resasc = wgk[0] * std::abs(fv[0][k] - reskh);
        for (int j = 1; j <= 10; ++j)
            resasc += wgk[j] * (std::abs(fv[2 * j - 1][k] - reskh) + std::abs(fv[2 * j][k] - reskh));
        res[k] = resk * h;
        resabs *= std::abs(h);
        resasc *= std::abs(h);
        double e = std::abs((resk - resg) * h);
        if (resasc != 0.0 && e != 0.0) e = resasc * std::min(1.0, std::pow(200.0 * e / resasc, 1.5));
        if (resabs > uflow / (50.0 * eps)) e = std::max(50.0 * eps * resabs, e);
        err[k] = e;
    }
}

}  // namespace detail

// Globally adaptive integration of an R -> R^N integrand. Error control is on the
// weighted norm sum_k weights[k]*err[k] against max(abs_tol, rel_tol * sum_k weights[k]*|I_k|).
template <std::size_t N, class F>
AdaptiveResult<N> integrate_adaptive(F&& f, Interval iv, const IntegrationOptions& opt,
                                     const std::array<double, N>& weights) {
    using Seg = detail::Segment<N>;
    const auto pieces = detail::make_pieces(iv, opt);
    const double L = opt.tail_scale;

    auto eval_on = [&](int pi) {
        const detail::Piece& p = pieces[pi];
        return [&, p](double u) {
            double jac = 0.0;
            const double x = detail::map_point(p, u, L, jac);
            std::array<double, N> out{};
            if (!std::isfinite(x) || jac == 0.0) return out;
            out = f(x);
            for (std::size_t k = 0; k < N; ++k) {
                if (!std::isfinite(out[k]))
                    throw EvaluationError("integrand not finite at x = " + std::to_string(x));
                out[k] *= jac;
            }
            return out;
        };
    };
    auto norm_of = [&](const std::array<double, N>& e) {
        double s = 0.0;
        for (std::size_t k = 0; k < N; ++k) s += weights[k] * e[k];
        return s;
    };
    auto make_seg = [&](int pi, double ua, double ub) {
        Seg s{pi, ua, ub, {}, {}, 0.0};
        auto g = eval_on(pi);
        detail::gk21<N>(g, ua, ub, s.val, s.err);
        s.norm = norm_of(s.err);
        return s;
    };

    std::vector<Seg> segs;
    segs.reserve(64);
    for (int i = 0; i < static_cast<int>(pieces.size()); ++i) segs.push_back(make_seg(i, 0.0, 1.0));

    auto cmp = [&](int a, int b) { return segs[a].norm < segs[b].norm; };
    std::priority_queue<int, std::vector<int>, decltype(cmp)> heap(cmp);
    for (int i = 0; i < static_cast<int>(segs.size()); ++i) heap.push(i);

    auto totals = [&](std::array<double, N>& v, std::array<double, N>& e) {
        v.fill(0.0);
        e.fill(0.0);
        for (const auto& s : segs)
            for (std::size_t k = 0; k < N; ++k) {
                v[k] += s.val[k];
                e[k] += s.err[k];
            }
    };
    auto target_of = [&](const std::array<double, N>& v) {
        double mag = 0.0;
        for (std::size_t k = 0; k < N; ++k) mag += weights[k] * std::abs(v[k]);
        return std::max(opt.abs_tol, opt.rel_tol * mag);
    };

    AdaptiveResult<N> out;
    std::array<double, N> v, e;
    totals(v, e);
    double err_norm = norm_of(e);
    double frozen_norm = 0.0;
    int checks = 0;
    while (!heap.empty() && static_cast<int>(segs.size()) < opt.max_intervals) {
        if (err_norm <= target_of(v)) break;
        const int idx = heap.top();
        heap.pop();
        const Seg parent = segs[idx];
        const double mid = 0.5 * (parent.ua + parent.ub);
        const double width = parent.ub - parent.ua;
        if (width < 1e-13 * std::max(1e-3, std::abs(mid)) || mid <= parent.ua || mid >= parent.ub) {
            frozen_norm += parent.norm;  // cannot be refined further in u
            continue;
        }
        Seg left = make_seg(parent.piece, parent.ua, mid);
        Seg right = make_seg(parent.piece, mid, parent.ub);
        for (std::size_t k = 0; k < N; ++k) {
            v[k] += left.val[k] + right.val[k] - parent.val[k];
            e[k] += left.err[k] + right.err[k] - parent.err[k];
        }
        err_norm += left.norm + right.norm - parent.norm;
        segs[idx] = left;
        segs.push_back(right);
        heap.push(idx);
        heap.push(static_cast<int>(segs.size()) - 1);
        // resum now and then so the running totals do not drift
        if (++checks % 64 == 0) {
            totals(v, e);
            err_norm = norm_of(e);
        }
    }
    (void)frozen_norm;
    totals(v, e);
    out.value = v;
    out.error = e;
    out.intervals = static_cast<int>(segs.size());
    out.converged = norm_of(e) <= target_of(v);
    return out;
}

// Scalar integration. Throws ConvergenceError (carrying the best estimate) when
// the error target is not met within the interval budget.
EstimateWithError integrate(const std::function<double(double)>& f, Interval iv, double tol);
EstimateWithError integrate(const std::function<double(double)>& f, Interval iv,
                            const IntegrationOptions& opt);

// Same as integrate() but reports failure through the flag instead of throwing.
AdaptiveResult<1> integrate_nothrow(const std::function<double(double)>& f, Interval iv,
                                    const IntegrationOptions& opt);

// Final node set of an adaptive run, usable to integrate other functions on the
// same partition. Weights include the map Jacobians.
QuadratureRule adaptive_rule(const std::function<double(double)>& f, Interval iv,
                             const IntegrationOptions& opt);

// E[g(mean + sqrt(var) Z)], Z standard normal, via the Hermite table.
double gaussian_expectation(const std::function<double(double)>& g, double mean, double var,
                            int order = kDefaultHermiteOrder);

}  // namespace condent
