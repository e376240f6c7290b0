#include "condent/rate_bounds.hpp"

#include <algorithm>
#include <cmath>

#include "condent/errors.hpp"
#include "condent/format.hpp"
#include "condent/special.hpp"

namespace condent {

namespace {

std::string fmt(double x) { return shortest(x); }

// -(k) log(1 + x) without cancellation for small x
double neg_log1p_scaled(double k, double x) { return -k * std::log1p(x); }

struct Upper {
    double ub_inf, ub_prev_inf;
};

Upper asymptotic_upper(double vx, double nx, double nv, double d) {
    const double b = 1.0 / d - 1.0 / vx;
    const double lead = 0.5 * nv * b;
    const double ub = (d < nx ? 0.5 * std::log(vx / nx) : 0.5 * std::log(vx / d)) + lead;
    const double prev = lead + 0.5 * std::log1p(b * (d + 2.0 * std::sqrt(d * nv)));
    return {ub, prev};
}

double fisher_or_throw(const InputDistribution& input) {
    FisherInformation fi;
    try {
        fi = fisher_information(input);
    } catch (const ConvergenceError& e) {
        throw UnsupportedInputError(input.spec() + ": J(X) is not finite (" + e.what() + ")");
    }
    if (fi.edge_truncated)
        throw UnsupportedInputError(input.spec() + ": J(X) is only finite on a truncated support");
    return fi.j.value;
}

}  // namespace

double log_plus(double x) { return x > 1.0 ? std::log(x) : 0.0; }

CEOSetting CEOSetting::finite(InputDistribution input, double noise_var, int agents) {
    if (!(noise_var > 0.0) || !std::isfinite(noise_var)) throw ParameterError("noise variance must be positive and finite");
    if (agents < 1) throw ParameterError("number of agents must be at least 1, got " + std::to_string(agents));
    return CEOSetting{std::move(input), noise_var, agents, false};
}

CEOSetting CEOSetting::infinite(InputDistribution input, double noise_var) {
    if (!(noise_var > 0.0) || !std::isfinite(noise_var)) throw ParameterError("noise variance must be positive and finite");
    return CEOSetting{std::move(input), noise_var, 0, true};
}

double CEOSetting::averaged_noise_var() const { return infinite_agents ? 0.0 : noise_var / agents; }

double CEOSetting::linear_mmse() const {
    const double vx = input.variance(), s = averaged_noise_var();
    return vx * s / (vx + s);
}

ScalarChannel CEOSetting::averaged_channel() const {
    if (infinite_agents) throw DomainError("the averaged channel is noiseless for infinitely many agents");
    return ScalarChannel(input, averaged_noise_var());
}

ChannelPowers channel_powers(const ScalarChannel& ch) {
    const auto r = entropy_report(ch);
    ChannelPowers p;
    p.var_x = ch.input().variance();
    p.noise_var = ch.noise_var();
    p.n_x = entropy_power(r.h_x.value);
    p.n_y = entropy_power(r.h_y.value);
    p.n_cond_mean = entropy_power(r.h_cond_mean.value);
    p.mmse = r.mmse.value;
    const double dh = std::max({r.h_x.abs_error, r.h_y.abs_error, r.h_cond_mean.abs_error});
    p.abs_error = std::max(2.0 * dh * std::max({p.n_x, p.n_y, p.n_cond_mean}), r.mmse.abs_error);
    return p;
}

ChannelPowers ceo_powers(const CEOSetting& s) {
    if (!s.infinite_agents) return channel_powers(s.averaged_channel());
    ChannelPowers p;
    const auto h = entropy(s.input);
    p.var_x = s.input.variance();
    p.n_x = p.n_y = p.n_cond_mean = entropy_power(h.value);
    p.abs_error = 2.0 * h.abs_error * p.n_x;
    return p;
}

RemoteLowerBounds remote_lower_bounds(const ChannelPowers& p, double d) {
    if (!(d > p.mmse))
        throw DomainError("remote lower bounds need D > mmse = " + fmt(p.mmse) + ", got D = " + fmt(d));
    const double den = p.n_y - p.n_x * p.noise_var / d;
    if (!(den > 0.0)) throw DomainError("N(Y) - N(X) sigma_W^2 / D is not positive at D = " + fmt(d));
    RemoteLowerBounds r;
    r.lb1 = 0.5 * log_plus(p.n_cond_mean / d) + 0.5 * log_plus(p.n_y / den);
    r.lb2 = 0.5 * log_plus(p.n_x / d) + 0.5 * log_plus(p.n_x / den);
    const double e = p.abs_error;
    r.abs_error = 0.5 * e * (1.0 / p.n_cond_mean + 1.0 / p.n_y + 1.0 / p.n_x + (1.0 + p.noise_var / d) / den);
    return r;
}

RemoteLowerBounds remote_lower_bounds(const ScalarChannel& ch, double d) {
    return remote_lower_bounds(channel_powers(ch), d);
}

CoopBounds coop_bounds(const CEOSetting& s, const ChannelPowers& p, double d) {
    CoopBounds c;
    if (d > p.mmse)
        c.tight = 0.5 * log_plus(p.n_cond_mean / (d - p.mmse));
    else
        c.tight_reason = "D <= mmse(X|Y(M)) = " + fmt(p.mmse);
    const double sig = s.averaged_noise_var();
    const double lo = p.n_x * sig / p.n_y;
    if (d > lo)
        c.weak = 0.5 * log_plus(p.n_cond_mean / d) + 0.5 * log_plus(p.n_y / (p.n_y - p.n_x * sig / d));
    else
        c.weak_reason = "D <= N(X) sigma_W^2 / (M N(Y(M))) = " + fmt(lo);
    return c;
}

CoopBounds coop_bounds(const CEOSetting& s, double d) { return coop_bounds(s, ceo_powers(s), d); }

double ceo_sum_rate_ub(const CEOSetting& s, double d) {
    const double vx = s.input.variance();
    const double lin = s.linear_mmse();
    if (!(d > lin)) throw DomainError("CEO sum-rate bound needs D > " + fmt(lin) + ", got D = " + fmt(d));
    if (d >= vx) return 0.0;
    if (s.infinite_agents) return 0.5 * std::log(vx / d) + 0.5 * s.noise_var * (1.0 / d - 1.0 / vx);
    return 0.5 * std::log(vx / d) + neg_log1p_scaled(0.5 * s.agents, s.averaged_noise_var() * (1.0 / vx - 1.0 / d));
}

RateLoss rate_loss_bounds(const CEOSetting& s, const ChannelPowers& p, double d) {
    RateLoss r;
    const double vx = s.input.variance();
    if (!(d > 0.0)) throw DomainError("distortion must be positive, got " + fmt(d));

    if (s.infinite_agents) {
        if (d < vx) {
            const auto u = asymptotic_upper(vx, p.n_x, s.noise_var, d);
            r.ub_thm9 = r.ub_thm10 = u.ub_inf;
            r.ub_prev = u.ub_prev_inf;
            r.gauss_exact = 0.5 * s.noise_var * (1.0 / d - 1.0 / vx);
        } else {
            r.thm9_reason = r.thm10_reason = r.prev_reason = r.gauss_reason = "D >= sigma_X^2";
        }
        try {
            const auto a = rate_loss_asymptotic(s.input, s.noise_var, d);
            if (a.lb_inf)
                r.lb = *a.lb_inf;
            else
                r.lb_reason = "D >= 1/J(X)";
        } catch (const UnsupportedInputError& e) {
            r.lb_reason = e.what();
        } catch (const DomainError& e) {
            r.lb_reason = e.what();
        }
        return r;
    }

    const double m = s.agents;
    const double sig = s.averaged_noise_var();
    const double lin = s.linear_mmse();
    const double a = sig * (1.0 / d - 1.0 / vx);  // 1 - a > 0 exactly when D > lin
    const bool above_lin = d > lin;
    const bool below_vx = d < vx;
    const double tail = neg_log1p_scaled(0.5 * m, -a);  // (M/2) log 1/(1 - a)
    const std::string lin_msg = "D <= sigma_X^2 (sigma_W^2/M) / sigma_Y(M)^2 = " + fmt(lin);

    if (above_lin && below_vx)
        r.gauss_exact = neg_log1p_scaled(0.5 * (m - 1.0), -a);
    else
        r.gauss_reason = above_lin ? "D >= sigma_X^2" : lin_msg;

    const double lb_hi = p.n_y > p.n_x ? p.n_x * sig / (p.n_y - p.n_x) : INFINITY;
    if (above_lin && d < lb_hi)
        r.lb = -0.5 * m * std::log(p.n_y / p.n_x - sig / d) - 0.5 * std::log(vx / p.n_x) + 0.5 * std::log1p(-a);
    else
        r.lb_reason = above_lin ? "D >= N(X) (sigma_W^2/M) / (N(Y(M)) - N(X)) = " + fmt(lb_hi) : lin_msg;

    if (above_lin && below_vx) {
        const double shrink = 1.0 - sig * p.n_x / (d * p.n_y);
        const double head = d < p.n_cond_mean ? vx / p.n_cond_mean : vx / d;
        r.ub_thm9 = 0.5 * std::log(head * shrink) + tail;
    } else {
        r.thm9_reason = above_lin ? "D >= sigma_X^2" : lin_msg;
    }

    // The point D = mmse + N(E[X|Y(M)]) joins the two windows; both branches agree there.
    const double split = p.mmse + p.n_cond_mean;
    if (!above_lin)
        r.thm10_reason = lin_msg;
    else if (!(d > p.mmse))
        r.thm10_reason = "D <= mmse(X|Y(M)) = " + fmt(p.mmse);
    else if (d < split)
        r.ub_thm10 = 0.5 * std::log(vx / p.n_cond_mean) + 0.5 * std::log1p(-p.mmse / d) + tail;
    else if (below_vx)
        r.ub_thm10 = 0.5 * std::log(vx / d) + tail;
    else
        r.thm10_reason = "D >= sigma_X^2";

    if (above_lin && below_vx) {
        const double b = 1.0 / d - 1.0 / vx;
        const double inner = b * (d + 2.0 * std::sqrt(d * s.noise_var) + sig) / (1.0 - a);
        r.ub_prev = neg_log1p_scaled(0.5 * (m - 1.0), -a) + 0.5 * std::log1p(inner);
    } else {
        r.prev_reason = above_lin ? "D >= sigma_X^2" : lin_msg;
    }
    return r;
}

RateLoss rate_loss_bounds(const CEOSetting& s, double d) { return rate_loss_bounds(s, ceo_powers(s), d); }

RateLossAsymptotic rate_loss_asymptotic(const InputDistribution& input, double noise_var, double d) {
    const double vx = input.variance();
    if (!(d > 0.0 && d < vx)) throw DomainError("asymptotic rate loss needs 0 < D < sigma_X^2 = " + fmt(vx));
    const double j = fisher_or_throw(input);
    const double nx = entropy_power(entropy(input).value);
    RateLossAsymptotic r;
    const auto u = asymptotic_upper(vx, nx, noise_var, d);
    r.ub_inf = u.ub_inf;
    r.ub_prev_inf = u.ub_prev_inf;
    if (d < 1.0 / j) r.lb_inf = 0.5 * noise_var * (1.0 / d - j) - 0.5 * std::log(vx / nx);
    return r;
}

EstimateWithError kappa(const InputDistribution& input) {
    FisherInformation fi;
    try {
        fi = fisher_information(input);
    } catch (const ConvergenceError& e) {
        throw UnsupportedInputError(input.spec() + ": kappa needs a finite J(X) (" + e.what() + ")");
    }
    if (fi.edge_truncated)
        throw UnsupportedInputError(input.spec() + ": kappa needs J(X) finite without support truncation");
    const auto h = entropy(input);
    const double n = entropy_power(h.value);
    const double j = fi.j.value;
    return {n * j, n * fi.j.abs_error + 2.0 * n * j * h.abs_error, Method::quadrature};
}

KappaCheck kappa_check(const InputDistribution& input) {
    KappaCheck k;
    k.kappa = kappa(input);
    const double n0 = entropy_power(entropy(input).value);
    auto slope = [&](double s) { return (entropy_power(output_entropy(ScalarChannel(input, s)).value) - n0) / s; };
    k.fd_s1e3 = slope(1e-3);
    k.fd_s1e4 = slope(1e-4);
    // secant slope = kappa + c sqrt(s) + ...
    const double r = std::sqrt(10.0);
    k.fd_limit = (r * k.fd_s1e4 - k.fd_s1e3) / (r - 1.0);
    k.rel_diff = std::abs(k.fd_limit - k.kappa.value) / std::abs(k.kappa.value);
    return k;
}

std::vector<double> distortion_grid(double lo, double hi, int n) {
    if (!(lo > 0.0 && hi > lo && std::isfinite(hi))) throw ParameterError("distortion grid needs 0 < lo < hi < inf");
    if (n < 2) throw ParameterError("distortion grid needs at least 2 points");
    const double inset = 1e-6 * (hi - lo);
    const double a = lo + inset, b = hi - inset;
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = a * std::pow(b / a, static_cast<double>(i) / (n - 1));
    g.front() = a;
    g.back() = b;
    return g;
}

RateRow rate_row(const CEOSetting& s, const ChannelPowers& p, double d) {
    RateRow row;
    row.d = d;
    if (d > p.mmse) {
        const double den = p.n_y - p.n_x * p.noise_var / d;
        if (den > 0.0) {
            const auto rl = remote_lower_bounds(p, d);
            row.remote_lb1 = rl.lb1;
            row.remote_lb2 = rl.lb2;
        }
    }
    const auto c = coop_bounds(s, p, d);
    row.coop_tight = c.tight;
    row.coop_weak = c.weak;
    if (d > s.linear_mmse()) row.ceo_ub = ceo_sum_rate_ub(s, d);
    row.loss = rate_loss_bounds(s, p, d);
    return row;
}

namespace {

std::vector<std::optional<double>*> row_fields(RateRow& r) {
    return {&r.remote_lb1, &r.remote_lb2, &r.coop_tight, &r.coop_weak, &r.ceo_ub, &r.loss.lb,
            &r.loss.ub_thm9, &r.loss.ub_thm10, &r.loss.ub_prev, &r.loss.gauss_exact};
}

}  // namespace

RateRow rate_row_error(const CEOSetting& s, const ChannelPowers& p, double d) {
    RateRow nominal = rate_row(s, p, d);
    RateRow err;
    err.d = d;
    auto nf = row_fields(nominal);
    auto ef = row_fields(err);
    std::vector<double> ss(nf.size(), 0.0);
    const double e = p.abs_error;
    for (double ChannelPowers::*field : {&ChannelPowers::n_x, &ChannelPowers::n_y, &ChannelPowers::n_cond_mean,
                                         &ChannelPowers::mmse}) {
        if (s.infinite_agents && field != &ChannelPowers::n_x) continue;
        std::vector<double> worst(nf.size(), 0.0);
        for (double sign : {-1.0, 1.0}) {
            ChannelPowers q = p;
            q.*field += sign * e;
            if (s.infinite_agents) q.n_y = q.n_cond_mean = q.n_x;
            if (!(q.*field > 0.0)) continue;
            RateRow r;
            try {
                r = rate_row(s, q, d);
            } catch (const DomainError&) {
                continue;
            }
            auto rf = row_fields(r);
            for (std::size_t i = 0; i < nf.size(); ++i)
                if (*nf[i] && *rf[i]) worst[i] = std::max(worst[i], std::abs(**rf[i] - **nf[i]));
        }
        for (std::size_t i = 0; i < nf.size(); ++i) ss[i] += worst[i] * worst[i];
    }
    for (std::size_t i = 0; i < nf.size(); ++i)
        if (*nf[i]) *ef[i] = std::sqrt(ss[i]);
    return err;
}

std::vector<RateRow> rate_curve(const CEOSetting& s, const std::vector<double>& d_grid) {
    const auto p = ceo_powers(s);
    std::vector<RateRow> rows;
    rows.reserve(d_grid.size());
    for (double d : d_grid) rows.push_back(rate_row(s, p, d));
    return rows;
}

}  // namespace condent
