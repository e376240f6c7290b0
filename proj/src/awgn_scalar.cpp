#include "condent/awgn_scalar.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <random>

#include "condent/entropy.hpp"
#include "condent/errors.hpp"
#include "condent/parallel.hpp"

namespace condent {

namespace {

// Half-width of the posterior window in noise standard deviations: exp(-38.5^2/2) < 1e-320.
constexpr double kWindow = 38.5;

struct Core {
    double log_py;
    double mean;
    double var;
};

Core posterior_core(const ScalarChannel& ch, double y, double rel_tol) {
    const InputDistribution& in = ch.input();
    const double s2 = ch.noise_var();
    const double sw = std::sqrt(s2);
    const double mu = in.mean();
    const double v = in.variance();
    const Interval sup = in.support();

    // linear estimate as centring point; its spread as the moment scale
    const double c = std::clamp(mu + v / (v + s2) * (y - mu), sup.lo, sup.hi);
    const double ell = std::sqrt(ch.linear_mmse());

    const double lo = std::max(sup.lo, std::min({y, c, mu}) - kWindow * sw);
    const double hi = std::min(sup.hi, std::max({y, c, mu}) + kWindow * sw);

    IntegrationOptions opt;
    opt.abs_tol = 0.0;
    opt.rel_tol = rel_tol;
    opt.max_intervals = 4000;
    opt.breakpoints = in.landmarks();
    for (double k : {0.0, -3.0, 3.0, -8.0, 8.0, -16.0, 16.0}) opt.breakpoints.push_back(y + k * sw);
    for (double k : {0.0, -3.0, 3.0, -8.0, 8.0}) opt.breakpoints.push_back(c + k * ell);
    const IntegrationOptions hints = in.integration_hints();
    opt.sqrt_lo = hints.sqrt_lo && lo == sup.lo;
    opt.sqrt_hi = hints.sqrt_hi && hi == sup.hi;

    auto log_f = [&](double s) {
        const double d = y - s;
        return in.log_pdf(s) - d * d / (2.0 * s2);
    };
    // log-shift so the integrand peaks near 1 whatever the size of p_Y(y)
    double lmax = -std::numeric_limits<double>::infinity();
    for (double s : opt.breakpoints)
        if (s >= lo && s <= hi) lmax = std::max(lmax, log_f(s));
    for (double s : {lo, hi, std::clamp(y, lo, hi), std::clamp(c, lo, hi), 0.5 * (lo + hi)})
        lmax = std::max(lmax, log_f(s));
    // far-tail posteriors of compact-support inputs sit in a thin layer at an edge
    for (double k = 1e-12; k < 0.5; k *= 10.0) {
        lmax = std::max(lmax, log_f(lo + k * (hi - lo)));
        lmax = std::max(lmax, log_f(hi - k * (hi - lo)));
    }
    // coarse scan, then golden-section refinement around the best scan point;
    // the mode need not be near y or the linear estimate (mixtures far out)
    {
        constexpr int kScan = 64;
        const double step = (hi - lo) / kScan;
        double best_s = lo, best = -std::numeric_limits<double>::infinity();
        for (int i = 0; i <= kScan; ++i) {
            const double s = lo + i * step;
            const double v = log_f(s);
            if (v > best) {
                best = v;
                best_s = s;
            }
        }
        double a = std::max(lo, best_s - step), b = std::min(hi, best_s + step);
        const double g = 0.5 * (std::sqrt(5.0) - 1.0);
        double x1 = b - g * (b - a), x2 = a + g * (b - a);
        double f1 = log_f(x1), f2 = log_f(x2);
        for (int it = 0; it < 60 && b - a > 1e-9 * ell; ++it) {
            if (f1 < f2) {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + g * (b - a);
                f2 = log_f(x2);
            } else {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - g * (b - a);
                f1 = log_f(x1);
            }
        }
        const double mode = f1 > f2 ? x1 : x2;
        lmax = std::max({lmax, best, f1, f2});
        if (std::isfinite(std::max(f1, f2)))
            for (double k : {0.0, -3.0, 3.0, -8.0, 8.0}) opt.breakpoints.push_back(mode + k * ell);
    }
    if (!std::isfinite(lmax))
        throw TailError("posterior at y = " + std::to_string(y) + " has no mass on the sampled window");

    // exp(log_f - lmax) carries relative rounding noise of order eps*|lmax|
    opt.rel_tol = std::max(rel_tol, 64.0 * std::numeric_limits<double>::epsilon() * std::abs(lmax));
    auto f = [&](double s) {
        const double t = log_f(s) - lmax;
        const double e = t > -745.0 ? std::exp(t) : 0.0;
        const double d = s - c;
        return std::array<double, 3>{e, e * d, e * d * d};
    };
    const auto r = integrate_adaptive<3>(f, {lo, hi}, opt, {1.0, 1.0 / ell, 1.0 / (ell * ell)});
    const double m0 = r.value[0];
    if (!(m0 > 0.0)) throw TailError("posterior normalizer vanished at y = " + std::to_string(y));
    const double m1 = r.value[1] / m0;
    if (!r.converged)
        throw ConvergenceError("posterior quadrature did not converge at y = " + std::to_string(y),
                               {c + m1, r.error[1] / m0, Method::quadrature});
    Core out;
    out.log_py = lmax + std::log(m0) - 0.5 * std::log(2.0 * M_PI * s2);
    out.mean = c + m1;
    out.var = r.value[2] / m0 - m1 * m1;
    return out;
}

EstimateWithError quad(double v, double e) { return {v, e, Method::quadrature}; }

}  // namespace

ScalarChannel::ScalarChannel(InputDistribution input, double noise_var) : input_(std::move(input)), noise_var_(noise_var) {
    if (!(noise_var > 0.0) || !std::isfinite(noise_var))
        throw ParameterError("noise variance must be positive and finite");
    if (!std::isfinite(input_.variance()) || !(input_.variance() > 0.0))
        throw ParameterError("input variance must be positive and finite");
}

MarginalDensity marginal_density(const ScalarChannel& ch, double y) {
    MarginalDensity m;
    m.log_value = posterior_core(ch, y, 1e-12).log_py;
    const double p = std::exp(m.log_value);
    m.far_tail = !(p >= kFarTailFloor);
    m.value = m.far_tail ? kFarTailFloor : p;
    return m;
}

double marginal_pdf(const ScalarChannel& ch, double y) { return marginal_density(ch, y).value; }

PosteriorPoint posterior_point(const ScalarChannel& ch, double y) {
    const Core c = posterior_core(ch, y, 1e-12);
    if (c.log_py < std::log(kFarTailFloor)) {
        const double sy = std::sqrt(ch.output_var());
        throw TailError("y = " + std::to_string(y) + " is in the far tail (log p_Y = " + std::to_string(c.log_py) +
                        "); usable range is roughly |y - mean| < " + std::to_string(35.0 * sy));
    }
    PosteriorPoint p;
    p.y = y;
    p.density = std::exp(c.log_py);
    p.cond_mean = c.mean;
    p.cond_var = c.var;
    p.score = (c.mean - y) / ch.noise_var();
    return p;
}

double cond_mean(const ScalarChannel& ch, double y) { return posterior_point(ch, y).cond_mean; }

OutputSummary summarize_output(const ScalarChannel& ch) {
    const InputDistribution& in = ch.input();
    const double mu = in.mean();
    const double sx = in.stddev();
    const double sy = std::sqrt(ch.output_var());
    const double vl = ch.linear_mmse();

    IntegrationOptions opt;
    opt.abs_tol = 0.0;
    opt.rel_tol = 1e-10;
    opt.max_intervals = 2000;
    opt.tail_scale = sy;
    opt.breakpoints = in.landmarks();
    for (double k : {0.0, -1.0, 1.0, -2.0, 2.0, -4.0, 4.0, -8.0, 8.0}) opt.breakpoints.push_back(mu + k * sy);

    std::atomic<int> hits{0};
    auto f = [&](double y) {
        std::array<double, 7> out{};
        const Core c = posterior_core(ch, y, 1e-12);
        if (c.log_py < -700.0) return out;
        const double p = std::exp(c.log_py);
        double v = c.var;
        if (!(v >= kCondVarFloor)) {
            v = kCondVarFloor;
            ++hits;
        }
        const double dv = v - vl;
        const double dm = c.mean - mu;
        out = {p, -p * c.log_py, p * std::log(v), p * dv, p * dv * dv, p * dm, p * dm * dm};
        return out;
    };
    const std::array<double, 7> w{1.0, 1.0, 1.0, 1.0 / vl, 1.0 / (vl * vl), 1.0 / sx, 1.0 / (sx * sx)};
    const auto r = integrate_adaptive<7>(f, {-INFINITY, INFINITY}, opt, w);
    const double m = r.value[0];
    if (!r.converged)
        throw ConvergenceError("output-side expectation did not converge", quad(r.value[1] / m, r.error[1] / m));

    OutputSummary s;
    auto e = [&](int k) { return r.error[k] / m + std::abs(r.value[k] / m) * r.error[0] / m; };
    s.mass = quad(m, r.error[0]);
    s.h_y = quad(r.value[1] / m, e(1));
    s.e_log_cond_var = quad(r.value[2] / m, e(2));
    const double dv = r.value[3] / m;
    s.mmse = quad(vl + dv, e(3));
    s.var_cond_var = quad(r.value[4] / m - dv * dv, e(4) + 2.0 * std::abs(dv) * e(3));
    const double dm = r.value[5] / m;
    s.var_cond_mean = quad(r.value[6] / m - dm * dm, e(6) + 2.0 * std::abs(dm) * e(5));
    s.floor_hits = hits.load();
    return s;
}

EstimateWithError mmse(const ScalarChannel& ch) { return summarize_output(ch).mmse; }

EstimateWithError var_cond_mean(const ScalarChannel& ch) {
    const auto m = mmse(ch);
    return quad(ch.input().variance() - m.value, m.abs_error);
}

EstimateWithError output_entropy(const ScalarChannel& ch) {
    const double mu = ch.input().mean();
    const double sy = std::sqrt(ch.output_var());
    IntegrationOptions hints;
    hints.tail_scale = sy;
    hints.breakpoints = ch.input().landmarks();
    for (double k : {0.0, -1.0, 1.0, -2.0, 2.0, -4.0, 4.0, -8.0, 8.0}) hints.breakpoints.push_back(mu + k * sy);
    return entropy_from_pdf([&ch](double y) { return std::exp(posterior_core(ch, y, 1e-12).log_py); },
                            {-INFINITY, INFINITY}, 1e-10, hints);
}

EstimateWithError entropy_cond_mean(const ScalarChannel& ch) {
    const auto s = summarize_output(ch);
    return quad(s.h_y.value + s.e_log_cond_var.value - std::log(ch.noise_var()),
                s.h_y.abs_error + s.e_log_cond_var.abs_error);
}

EstimateWithError entropy_cond_mean_sampled(const ScalarChannel& ch, std::size_t n_samples, std::uint64_t seed) {
    if (n_samples < 100000) throw ParameterError("sampled oracle needs at least 1e5 samples");
    std::vector<double> ys = ch.input().sample(seed, n_samples);
    std::mt19937_64 g(seed ^ 0x5851f42d4c957f2dULL);
    std::normal_distribution<double> nd(0.0, std::sqrt(ch.noise_var()));
    for (auto& y : ys) y += nd(g);
    std::vector<double> cm(n_samples);
    parallel_for(n_samples, [&](std::size_t i) { cm[i] = posterior_core(ch, ys[i], 1e-10).mean; });
    auto est = knn_entropy(cm, 1, kKnnDefaultK, seed);
    est.method = Method::monte_carlo;
    return est;
}

EntropyReport entropy_report(const ScalarChannel& ch) {
    const double s2 = ch.noise_var();
    const double vx = ch.input().variance();
    const double vy = ch.output_var();
    const auto s = summarize_output(ch);
    EntropyReport r;
    r.h_x = entropy(ch.input());
    r.h_y = s.h_y;
    r.e_log_cond_var = s.e_log_cond_var;
    r.h_cond_mean = quad(s.h_y.value + s.e_log_cond_var.value - std::log(s2), s.h_y.abs_error + s.e_log_cond_var.abs_error);
    r.mmse = s.mmse;
    r.var_cond_mean = quad(vx - s.mmse.value, s.mmse.abs_error);
    r.var_cond_mean_direct = s.var_cond_mean;
    r.var_cond_var = s.var_cond_var;
    r.lower_main = quad(2.0 * r.h_x.value - s.h_y.value, 2.0 * r.h_x.abs_error + s.h_y.abs_error);
    r.ub_jensen = quad(s.h_y.value + std::log(s.mmse.value / s2), s.h_y.abs_error + s.mmse.abs_error / s.mmse.value);
    r.ub_linear = quad(s.h_y.value + std::log(vx / vy), s.h_y.abs_error);
    r.ub_maxent = EstimateWithError::exact(0.5 * std::log(2.0 * M_PI * M_E * vx * vx / vy));
    r.floor_hits = s.floor_hits;
    return r;
}

}  // namespace condent
