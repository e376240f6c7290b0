#include "condent/expofam.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "condent/errors.hpp"
#include "condent/format.hpp"
#include "condent/peaked.hpp"
#include "condent/special.hpp"

namespace condent {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double x) { return shortest(x); }

Interval intersect(Interval a, Interval b) { return {std::max(a.lo, b.lo), std::min(a.hi, b.hi)}; }

struct Core {
    double log_nu;
    double mean;
    double var;
};

// Posterior of X given Y = y: log-shifted adaptive quadrature of
// exp(s x y - A(x)) q(x) with its first two centred moments.
Core posterior_core(const ExpoFamChannel& ch, double y) {
    const auto& in = ch.input();
    const auto& fam = ch.family();
    const Interval dom = intersect(in.support(), fam.param_domain);

    PeakedProblem p;
    p.dom = dom;
    // t = x - o; the input density is evaluated from its lower edge when that is the boundary
    p.origin = std::isfinite(dom.lo) ? dom.lo : 0.0;
    const bool from_lo = std::isfinite(dom.lo) && dom.lo == in.support().lo;
    const double o = p.origin;
    p.log_w_t = [&, o, from_lo](double t) {
        const double x = o + t;
        const double lq = from_lo ? in.log_pdf_above_lo(t) : in.log_pdf(x);
        if (!(lq > -kInf)) return -kInf;
        return fam.sign * x * y - fam.cgf(x) + lq;
    };
    p.candidates = peak_candidates(dom, in.mean(), in.stddev(), in.landmarks());
    p.landmarks = in.landmarks();
    p.ref_scale = in.stddev();
    const IntegrationOptions hints = in.integration_hints();
    p.sqrt_lo = hints.sqrt_lo && dom.lo == in.support().lo;
    p.sqrt_hi = hints.sqrt_hi && dom.hi == in.support().hi;
    p.tail_power = hints.tail_power;

    const auto r = integrate_peaked<0>(p, [](double) { return std::array<double, 0>{}; });
    switch (r.status) {
        case PeakStatus::diverges:
            throw RegularityError("nu(y) diverges at y = " + fmt(y) + " for " + fam.tag);
        case PeakStatus::no_mass:
            throw RegularityError("nu(y) is not finite at y = " + fmt(y) + " for " + fam.tag);
        case PeakStatus::not_converged:
            throw ConvergenceError("exponential-family posterior quadrature did not converge at y = " + fmt(y),
                                   {r.mean, r.mean_err, Method::quadrature});
        case PeakStatus::ok:
            break;
    }
    return {r.log_mass, r.mean, r.var};
}

std::vector<double> y_landmarks(const ExpoFamChannel& ch) {
    const auto& in = ch.input();
    const auto& fam = ch.family();
    const Interval dom = intersect(in.support(), fam.param_domain);
    std::vector<double> xs = in.landmarks();
    for (double k : {-2.0, -1.0, 0.0, 1.0, 2.0, 4.0}) xs.push_back(in.mean() + k * in.stddev());
    std::vector<double> ys;
    for (double x : xs) {
        if (!(x > dom.lo && x < dom.hi)) continue;
        const double m = fam.cond_mean_y(x), s = fam.cond_sd_y(x);
        for (double k : {-3.0, -1.0, 0.0, 1.0, 3.0, 8.0}) {
            const double v = m + k * s;
            if (v > fam.support_y.lo && v < fam.support_y.hi) ys.push_back(v);
        }
    }
    return ys;
}

double typical_y_scale(const ExpoFamChannel& ch) {
    const auto& fam = ch.family();
    const double x = ch.input().mean();
    return std::max(std::abs(fam.cond_mean_y(x)), fam.cond_sd_y(x));
}

}  // namespace

ExpoFamily gamma_family(double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ParameterError("gamma family: shape must be positive, got " + fmt(alpha));
    ExpoFamily f;
    f.tag = "gamma:alpha=" + fmt(alpha);
    f.sign = -1.0;
    f.cgf = [alpha](double x) { return -alpha * std::log(x); };
    const double lg = log_gamma(alpha);
    f.base_log_pdf = [alpha, lg](double y) { return (alpha - 1.0) * std::log(y) - lg; };
    f.param_domain = {0.0, kInf};
    f.support_y = {0.0, kInf};
    f.cond_mean_y = [alpha](double x) { return alpha / x; };
    f.cond_sd_y = [alpha](double x) { return std::sqrt(alpha) / x; };
    const double hg = alpha + lg + (1.0 - alpha) * digamma(alpha);
    f.cond_entropy = [hg](double x) { return hg - std::log(x); };
    f.gamma_shape = alpha;
    return f;
}

ExpoFamily gaussian_base_family(double noise_var) {
    if (!(noise_var > 0.0) || !std::isfinite(noise_var))
        throw ParameterError("gaussian base: variance must be positive, got " + fmt(noise_var));
    ExpoFamily f;
    f.tag = "gaussian-base:var=" + fmt(noise_var);
    f.sign = 1.0;
    f.cgf = [noise_var](double x) { return 0.5 * noise_var * x * x; };
    f.base_log_pdf = [noise_var](double y) { return -0.5 * y * y / noise_var - 0.5 * std::log(2.0 * M_PI * noise_var); };
    f.param_domain = {-kInf, kInf};
    f.support_y = {-kInf, kInf};
    f.cond_mean_y = [noise_var](double x) { return noise_var * x; };
    const double s = std::sqrt(noise_var);
    f.cond_sd_y = [s](double) { return s; };
    const double h = 0.5 * std::log(2.0 * M_PI * M_E * noise_var);
    f.cond_entropy = [h](double) { return h; };
    return f;
}

ExpoFamChannel::ExpoFamChannel(InputDistribution input, ExpoFamily family)
    : input_(std::move(input)), family_(std::move(family)) {
    const Interval s = input_.support(), d = family_.param_domain;
    if (s.lo < d.lo || s.hi > d.hi)
        throw ParameterError(family_.tag + ": input support must lie in the parameter domain (" + input_.spec() + ")");
    // spot-check that each conditional law integrates to 1
    std::vector<double> xs;
    const double m = input_.mean(), sd = input_.stddev();
    for (double k : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
        double x = m + k * sd;
        if (!(x > d.lo && x < d.hi) || !(x >= s.lo && x <= s.hi)) x = m;
        xs.push_back(x);
    }
    for (double x : xs) {
        const double a = family_.cgf(x);
        const double cm = family_.cond_mean_y(x), cs = family_.cond_sd_y(x);
        IntegrationOptions opt;
        opt.abs_tol = 1e-12;
        opt.tail_scale = cs;
        opt.tail_power = 2;
        for (double k : {-8.0, -3.0, 0.0, 3.0, 8.0, 30.0}) opt.breakpoints.push_back(cm + k * cs);
        auto p = [&](double y) {
            const double l = family_.sign * x * y - a + family_.base_log_pdf(y);
            return l > -745.0 ? std::exp(l) : 0.0;
        };
        const auto r = integrate(p, family_.support_y, opt);
        if (std::abs(r.value - 1.0) > 1e-7)
            throw InputError(family_.tag + ": conditional density at x = " + fmt(x) + " integrates to " + fmt(r.value));
    }
}

double log_nu(const ExpoFamChannel& ch, double y) {
    const Interval sy = ch.family().support_y;
    if (!(y > sy.lo && y < sy.hi)) throw DomainError("y = " + fmt(y) + " is not inside the output support");
    return posterior_core(ch, y).log_nu;
}

double nu_ratio(const ExpoFamChannel& ch, double y) { return std::exp(log_nu(ch, y)); }

double log_marginal(const ExpoFamChannel& ch, double y) { return log_nu(ch, y) + ch.family().base_log_pdf(y); }

ExpoPosterior posterior_direct(const ExpoFamChannel& ch, double y) {
    const Interval sy = ch.family().support_y;
    if (!(y > sy.lo && y < sy.hi)) throw DomainError("y = " + fmt(y) + " is not inside the output support");
    const Core c = posterior_core(ch, y);
    return {c.mean, c.var};
}

TweedieMoments posterior_moments_tweedie(const ExpoFamChannel& ch, double y) {
    TweedieMoments t;
    t.direct = posterior_direct(ch, y);
    const double base = y != 0.0 ? std::abs(y) : typical_y_scale(ch);
    auto ln = [&](double v) { return log_nu(ch, v); };
    t.mean = ch.family().sign * richardson_first(ln, y, 1e-4 * base);
    t.var = richardson_second(ln, y, 1e-2 * base);
    const double em = std::abs(t.mean - t.direct.mean), ev = std::abs(t.var - t.direct.var);
    if (em > 1e-4 * (1.0 + std::abs(t.direct.mean)) || ev > 1e-4 * t.direct.var + 1e-12)
        throw IdentityViolation("generalized Tweedie mismatch at y = " + fmt(y) + ": mean " + fmt(t.mean) + " vs " +
                                fmt(t.direct.mean) + ", var " + fmt(t.var) + " vs " + fmt(t.direct.var));
    return t;
}

Thm7Result thm7_lower_bound(const ExpoFamChannel& ch) {
    const auto& fam = ch.family();
    IntegrationOptions opt;
    opt.abs_tol = 0.0;
    opt.rel_tol = 1e-10;
    opt.max_intervals = 2000;
    opt.tail_power = 2;
    opt.tail_scale = typical_y_scale(ch);
    opt.breakpoints = y_landmarks(ch);
    opt.sqrt_lo = std::isfinite(fam.support_y.lo);

    auto f = [&](double y) {
        std::array<double, 3> out{};
        const Core c = posterior_core(ch, y);
        const double lp = c.log_nu + fam.base_log_pdf(y);
        if (lp < -700.0 || !(c.var > 0.0)) return out;
        const double p = std::exp(lp);
        out = {p, -p * lp, p * std::log(c.var)};
        return out;
    };
    const auto r = integrate_adaptive<3>(f, fam.support_y, opt, {1.0, 1.0, 1.0});
    const double m = r.value[0];
    if (!r.converged)
        throw ConvergenceError("exponential-family output expectation did not converge",
                               {r.value[1] / m, r.error[1] / m, Method::quadrature});
    auto e = [&](int k) { return r.error[k] / m + std::abs(r.value[k] / m) * r.error[0] / m; };

    Thm7Result t;
    t.h_x = entropy(ch.input());
    t.h_y = {r.value[1] / m, e(1), Method::quadrature};
    t.e_log_cond_var = {r.value[2] / m, e(2), Method::quadrature};
    t.h_y_given_x = expect(ch.input(), fam.cond_entropy, 1e-11);
    t.truth = {t.h_y.value + t.e_log_cond_var.value, t.h_y.abs_error + t.e_log_cond_var.abs_error, Method::quadrature};
    t.corrective = {2.0 * (t.h_y_given_x.value - 0.5 * kLog2PiE), 2.0 * t.h_y_given_x.abs_error, Method::quadrature};
    t.bound = {2.0 * t.h_x.value - t.h_y.value + t.corrective.value,
               2.0 * t.h_x.abs_error + t.h_y.abs_error + t.corrective.abs_error, Method::quadrature};
    t.gap = t.truth.value - t.bound.value;
    return t;
}

namespace {
EstimateWithError expected_log(const InputDistribution& input) {
    if (input.support().lo < 0.0) throw ParameterError("gamma corrective: input must be positive (" + input.spec() + ")");
    EstimateWithError el;
    try {
        el = expect(input, [](double x) { return std::log(x); }, 1e-11);
    } catch (const Error& e) {
        throw RegularityError("E[log X] does not converge for " + input.spec() + " (" + e.what() + ")");
    }
    if (!std::isfinite(el.value)) throw RegularityError("E[log X] is not finite for " + input.spec());
    return el;
}
}  // namespace

EstimateWithError gamma_corrective(const InputDistribution& input, double alpha) {
    if (!(alpha > 0.0)) throw ParameterError("gamma corrective: alpha must be positive");
    const auto el = expected_log(input);
    const double hg = alpha + log_gamma(alpha) + (1.0 - alpha) * digamma(alpha);
    return {hg - 0.5 * kLog2PiE - el.value, el.abs_error, Method::quadrature};
}

std::optional<double> gamma_corrective_sign_change(const InputDistribution& input) {
    const double el = expected_log(input).value;
    auto delta = [el](double a) { return a + log_gamma(a) + (1.0 - a) * digamma(a) - 0.5 * kLog2PiE - el; };
    const double lo = 1e-8, hi = 1e8;
    if (delta(lo) * delta(hi) > 0.0) return std::nullopt;
    std::uintmax_t iters = 200;
    const auto r = boost::math::tools::toms748_solve(delta, lo, hi, boost::math::tools::eps_tolerance<double>(50), iters);
    return 0.5 * (r.first + r.second);
}

BetaPrimeGamma beta_prime_gamma_analytic(double alpha, double gamma) {
    if (!(alpha > gamma && gamma > 2.0)) throw ParameterError("beta-prime/gamma example needs alpha > gamma > 2");
    BetaPrimeGamma b;
    b.d = alpha - gamma;
    b.h_x = *make_beta_prime(alpha, gamma).entropy_analytic();
    b.h_y = gamma + log_gamma(gamma) + (1.0 - gamma) * digamma(gamma);
    // 1/X ~ Beta(gamma, d)
    b.e_log_x = digamma(alpha) - digamma(gamma);
    const double hyx = -b.e_log_x + alpha + log_gamma(alpha) + (1.0 - alpha) * digamma(alpha);
    b.corrective_delta = hyx - 0.5 * kLog2PiE;
    // E[log Var(X|Y)] = log d - 2 E[log Y], Y ~ Gamma(gamma, 1)
    b.truth = b.h_y + std::log(b.d) - 2.0 * digamma(gamma);
    b.bound = 2.0 * b.h_x - b.h_y + 2.0 * b.corrective_delta;
    b.gap = b.truth - b.bound;
    return b;
}

double beta_prime_gap(double d) {
    if (!(d > 0.0)) throw ParameterError("gap formula needs d > 0");
    return kLog2PiE + std::log(d) - 2.0 * log_gamma(d) + 2.0 * (d - 1.0) * digamma(d) - 2.0 * d;
}

}  // namespace condent
