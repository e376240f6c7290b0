#include <gtest/gtest.h>

#include <cmath>

#include "condent/errors.hpp"
#include "condent/rate_bounds.hpp"
#include "condent/special.hpp"

using namespace condent;

namespace {

// Gaussian input N(0, vx) observed through noise variance s: closed forms.
struct GaussPowers {
    double nx, ny, ne, mmse;
};
GaussPowers gauss_powers(double vx, double s) { return {vx, vx + s, vx * vx / (vx + s), vx * s / (vx + s)}; }

double lplus(double x) { return x > 1.0 ? std::log(x) : 0.0; }

// CEO sum-rate upper bound in its unsimplified form
double ceo_oracle(double vx, double nv, double m, double d) {
    if (d >= vx) return 0.0;
    const double sy2 = vx + nv / m;
    return 0.5 * lplus(vx / d) + 0.5 * m * lplus(m * vx / (m * sy2 - vx / d * nv));
}

double gauss_loss_oracle(double vx, double nv, double m, double d) {
    // (M-1)/2 log( D / ((vx + nv/M)/vx D - nv/M) )
    return 0.5 * (m - 1.0) * std::log(d / ((vx + nv / m) / vx * d - nv / m));
}

}  // namespace

TEST(RateBounds, LogPlus) {
    EXPECT_EQ(log_plus(0.5), 0.0);
    EXPECT_EQ(log_plus(1.0), 0.0);
    EXPECT_DOUBLE_EQ(log_plus(std::exp(2.0)), 2.0);
}

TEST(RateBounds, ChannelPowersGaussian) {
    const auto p = channel_powers(ScalarChannel(make_gaussian(0, 2), 0.5));
    const auto g = gauss_powers(2.0, 0.5);
    EXPECT_NEAR(p.n_x, g.nx, 1e-10);
    EXPECT_NEAR(p.n_y, g.ny, 1e-9);
    EXPECT_NEAR(p.n_cond_mean, g.ne, 1e-9);
    EXPECT_NEAR(p.mmse, g.mmse, 1e-10);
}

TEST(RateBounds, RemoteGaussianClosedForm) {
    // lb1 - lb2 = 1/2 log(D N(Y) / N(X)^2) for N(E[X|Y]) <= D < N(X); 0 for D < N(E[X|Y])
    for (double vx : {1.0, 4.0}) {
        const auto g = gauss_powers(vx, 1.0);
        const ScalarChannel ch(make_gaussian(0, vx), 1.0);
        const auto p = channel_powers(ch);
        for (double d : distortion_grid(g.mmse, vx, 20)) {
            const auto r = remote_lower_bounds(p, d);
            const double den = g.ny - g.nx / d;
            EXPECT_NEAR(r.lb1, 0.5 * lplus(g.ne / d) + 0.5 * lplus(g.ny / den), 1e-7);
            EXPECT_NEAR(r.lb2, 0.5 * lplus(g.nx / d) + 0.5 * lplus(g.nx / den), 1e-7);
            const double diff = d < g.ne ? 0.0 : 0.5 * std::log(d * g.ny / (g.nx * g.nx));
            EXPECT_NEAR(r.lb1 - r.lb2, diff, 1e-7) << "vx=" << vx << " D=" << d;
        }
    }
    const auto r = remote_lower_bounds(ScalarChannel(make_gaussian(0, 1), 1.0), 0.75);
    EXPECT_NEAR(r.lb1, 0.5 * std::log(3.0), 1e-8);
    EXPECT_NEAR(r.lb2, 0.5 * std::log(2.0), 1e-8);
}

TEST(RateBounds, RemoteDominanceCatalog) {
    for (const auto& name : catalog_names()) {
        const ScalarChannel ch(make_catalog(name, 2.0), 1.0);
        const auto p = channel_powers(ch);
        for (double d : distortion_grid(p.mmse, p.var_x, 50)) {
            const auto r = remote_lower_bounds(p, d);
            EXPECT_GE(r.lb1, r.lb2 - combined_tolerance({r.abs_error})) << name << " D=" << d;
            EXPECT_GE(r.lb2, 0.0);
        }
    }
    const auto u = remote_lower_bounds(ScalarChannel(make_uniform_zero_mean(1.0), 1.0), 0.6);
    EXPECT_GE(u.lb1, u.lb2);
}

TEST(RateBounds, RemoteFirstTermsVanish) {
    const ScalarChannel ch(make_laplace(1.0), 1.0);
    const auto p = channel_powers(ch);
    const double d = p.n_x * 1.01;
    const auto r = remote_lower_bounds(p, d);
    const double den = p.n_y - p.n_x * p.noise_var / d;
    EXPECT_DOUBLE_EQ(r.lb1, 0.5 * log_plus(p.n_y / den));
    EXPECT_DOUBLE_EQ(r.lb2, 0.5 * log_plus(p.n_x / den));
}

TEST(RateBounds, RemoteDomain) {
    const ScalarChannel ch(make_gaussian(0, 1), 1.0);
    EXPECT_THROW(remote_lower_bounds(ch, 0.5 - 1e-6), DomainError);
    EXPECT_THROW(remote_lower_bounds(ch, 0.3), DomainError);
    try {
        remote_lower_bounds(ch, 0.3);
    } catch (const DomainError& e) {
        EXPECT_NE(std::string(e.what()).find("0.5"), std::string::npos);
    }
}

TEST(RateBounds, CoopBounds) {
    const auto s = CEOSetting::finite(make_gaussian(0, 1), 1.0, 2);
    const auto c = coop_bounds(s, 0.4);
    ASSERT_TRUE(c.tight);
    EXPECT_NEAR(*c.tight, 0.5 * std::log((2.0 / 3.0) / (0.4 - 1.0 / 3.0)), 1e-8);
    const auto g = gauss_powers(1.0, 0.5);
    EXPECT_EQ(*coop_bounds(s, g.mmse + g.ne + 1e-3).tight, 0.0);
    ASSERT_TRUE(c.weak);
    EXPECT_NEAR(*c.weak, 0.5 * lplus(g.ne / 0.4) + 0.5 * lplus(2.0 * g.ny / (2.0 * g.ny - g.nx / 0.4)), 1e-8);
    // case form of the weak bound below N(E[X|Y(M)])
    EXPECT_NEAR(*c.weak, 0.5 * std::log(g.ne / (0.4 - 0.5 * g.nx / g.ny)), 1e-8);
    EXPECT_FALSE(coop_bounds(s, 0.3).tight);
    EXPECT_FALSE(coop_bounds(s, 0.3).tight_reason.empty());
    // tight dominates weak below N(E[X|Y(M)]), since mmse >= N(X) sigma_W^2 / (M N(Y(M)))
    const auto sl = CEOSetting::finite(make_laplace(1.0), 1.0, 3);
    const auto pl = channel_powers(sl.averaged_channel());
    for (double d : distortion_grid(pl.mmse, pl.n_cond_mean, 12)) {
        const auto b = coop_bounds(sl, pl, d);
        ASSERT_TRUE(b.tight && b.weak);
        EXPECT_GE(*b.tight, *b.weak - 1e-7) << "D=" << d;
    }
    const auto inf = CEOSetting::infinite(make_laplace(1.0), 1.0);
    const double nx = entropy_power(entropy(make_laplace(1.0)).value);
    for (double d : {0.2, 0.6, 2.0}) {
        EXPECT_NEAR(*coop_bounds(inf, d).weak, 0.5 * lplus(nx / d), 1e-12);
        EXPECT_NEAR(*coop_bounds(inf, d).tight, 0.5 * lplus(nx / d), 1e-12);
    }
}

TEST(RateBounds, CeoSumRate) {
    for (int m : {1, 2, 5}) {
        const auto s = CEOSetting::finite(make_gaussian(0, 1), 1.0, m);
        for (double d : {0.6, 0.75, 0.95}) EXPECT_NEAR(ceo_sum_rate_ub(s, d), ceo_oracle(1.0, 1.0, m, d), 1e-12);
        EXPECT_EQ(ceo_sum_rate_ub(s, 1.0), 0.0);
        EXPECT_EQ(ceo_sum_rate_ub(s, 3.0), 0.0);
    }
    EXPECT_NEAR(ceo_sum_rate_ub(CEOSetting::finite(make_gaussian(0, 1), 1.0, 2), 0.75),
                0.5 * std::log(4.0 / 3.0) + std::log(2.0 / (3.0 - 4.0 / 3.0)), 1e-12);
    const auto s2 = CEOSetting::finite(make_gaussian(0, 1), 1.0, 2);
    EXPECT_THROW(ceo_sum_rate_ub(s2, 1.0 / 3.0), DomainError);
    // limit M -> infinity
    const auto inf = CEOSetting::infinite(make_gaussian(0, 1), 1.0);
    const auto big = CEOSetting::finite(make_gaussian(0, 1), 1.0, 1000000);
    for (double d : {0.1, 0.5, 0.9}) {
        EXPECT_NEAR(ceo_sum_rate_ub(inf, d), 0.5 * std::log(1.0 / d) + 0.5 * (1.0 / d - 1.0), 1e-14);
        EXPECT_NEAR(ceo_sum_rate_ub(big, d), ceo_sum_rate_ub(inf, d), 1e-4);
    }
}

TEST(RateBounds, GaussianExactLossSpot) {
    const auto s = CEOSetting::finite(make_gaussian(0, 1), 1.0, 2);
    const auto r = rate_loss_bounds(s, 0.75);
    ASSERT_TRUE(r.gauss_exact && r.ub_thm10);
    EXPECT_NEAR(*r.gauss_exact, 0.5 * std::log(6.0 / 5.0), 1e-14);
    EXPECT_NEAR(*r.gauss_exact, 0.09116, 1e-5);
    EXPECT_NEAR(*r.ub_thm10, 0.09116, 1e-5);
    EXPECT_NEAR(*r.gauss_exact, gauss_loss_oracle(1.0, 1.0, 2.0, 0.75), 1e-14);
}

TEST(RateBounds, GaussianTightness) {
    for (int m : {2, 5, 10}) {
        const auto s = CEOSetting::finite(make_gaussian(0, 1), 1.0, m);
        for (double d : distortion_grid(s.linear_mmse(), 1.0, 50)) {
            const auto r = rate_loss_bounds(s, d);
            ASSERT_TRUE(r.ub_thm10 && r.gauss_exact) << "M=" << m << " D=" << d << " " << r.thm10_reason;
            EXPECT_NEAR(*r.gauss_exact, gauss_loss_oracle(1.0, 1.0, m, d), 1e-10);
            EXPECT_LE(std::abs(*r.ub_thm10 - *r.gauss_exact), 1e-5) << "M=" << m << " D=" << d;
            // the previous bound is looser for Gaussian inputs
            ASSERT_TRUE(r.ub_prev);
            EXPECT_GE(*r.ub_prev, *r.ub_thm10 - 1e-9);
        }
    }
}

TEST(RateBounds, GaussExactDecreasing) {
    const auto s = CEOSetting::finite(make_uniform_zero_mean(2.0), 0.5, 4);
    double prev = INFINITY;
    for (double d : distortion_grid(s.linear_mmse(), 2.0, 40)) {
        const double v = *rate_loss_bounds(s, d).gauss_exact;
        EXPECT_LT(v, prev);
        prev = v;
    }
}

TEST(RateBounds, OrderingAcrossCatalog) {
    for (const auto& name : catalog_names())
        for (int m : {2, 5}) {
            const auto s = CEOSetting::finite(make_catalog(name, 2.0), 1.0, m);
            const auto p = channel_powers(s.averaged_channel());
            for (double d : distortion_grid(s.linear_mmse(), 2.0, 30)) {
                const auto r = rate_loss_bounds(s, p, d);
                // ub_thm10 <= ub_thm9 holds on the first branch (D < N(E[X|Y(M)])) only
                if (r.ub_thm9 && r.ub_thm10 && d < p.n_cond_mean) {
                    EXPECT_LE(*r.ub_thm10, *r.ub_thm9 + 1e-7) << name << " D=" << d;
                }
                if (r.lb && r.ub_thm10) {
                    EXPECT_LE(*r.lb, *r.ub_thm10 + 1e-7) << name << " D=" << d;
                }
                if (r.ub_thm10) {
                    EXPECT_GE(*r.ub_thm10, -1e-7);
                }
            }
        }
}

TEST(RateBounds, SecondBranchOfThm9FallsBelowExactLoss) {
    // the weakened cooperation bound exceeds the true Gaussian remote rate near
    // D = sigma_X^2, so the second branch undercuts the exact loss there
    const auto s = CEOSetting::finite(make_gaussian(0, 2), 1.0, 2);
    const auto r = rate_loss_bounds(s, 1.99);
    ASSERT_TRUE(r.ub_thm9 && r.gauss_exact);
    EXPECT_LT(*r.ub_thm9, 0.0);
    EXPECT_LT(*r.ub_thm9, *r.gauss_exact);
    const auto c = coop_bounds(s, 1.99);
    EXPECT_GT(*c.weak, *c.tight);
}

TEST(RateBounds, NewBoundBeatsPrevious) {
    // M = 2 leaves D = 0.2 below sigma_X^2 (sigma_W^2/M) / sigma_Y(M)^2 = 1/3
    EXPECT_FALSE(rate_loss_bounds(CEOSetting::finite(make_laplace(1.0), 1.0, 2), 0.2).ub_thm10);
    for (const auto& name : {"uniform", "laplace", "exponential"})
        for (int m : {2, 5, 10})
            for (double d : {0.2, 0.4, 0.6}) {
                if (m == 2 && d == 0.2) continue;
                const auto r = rate_loss_bounds(CEOSetting::finite(make_catalog(name, 1.0), 1.0, m), d);
                ASSERT_TRUE(r.ub_thm10 && r.ub_prev) << name;
                EXPECT_LE(*r.ub_thm10, *r.ub_prev) << name << " M=" << m << " D=" << d;
            }
}

TEST(RateBounds, Windows) {
    const auto s = CEOSetting::finite(make_laplace(1.0), 1.0, 3);
    const auto p = channel_powers(s.averaged_channel());
    const double lin = s.linear_mmse();
    const double e = 1e-9;
    auto at = [&](double d) { return rate_loss_bounds(s, p, d); };
    EXPECT_FALSE(at(lin - e).ub_thm9);
    EXPECT_TRUE(at(lin + e).ub_thm9);
    EXPECT_TRUE(at(1.0 - e).ub_thm9);
    EXPECT_FALSE(at(1.0 + e).ub_thm9);
    EXPECT_FALSE(at(lin - e).gauss_exact);
    EXPECT_TRUE(at(lin + e).gauss_exact);
    EXPECT_FALSE(at(1.0 + e).gauss_exact);
    EXPECT_FALSE(at(lin - e).ub_prev);
    EXPECT_TRUE(at(lin + e).ub_prev);
    EXPECT_FALSE(at(1.0 + e).ub_prev);
    const double thm10_lo = std::max(lin, p.mmse);
    EXPECT_FALSE(at(thm10_lo - e).ub_thm10);
    EXPECT_TRUE(at(thm10_lo + e).ub_thm10);
    EXPECT_TRUE(at(1.0 - e).ub_thm10);
    EXPECT_FALSE(at(1.0 + e).ub_thm10);
    const double split = p.mmse + p.n_cond_mean;
    if (split < 1.0) {
        const auto lo = at(split - e), hi = at(split + e);
        ASSERT_TRUE(lo.ub_thm10 && hi.ub_thm10);
        EXPECT_NEAR(*lo.ub_thm10, *hi.ub_thm10, 1e-7);
    }
    const double lb_hi = p.n_x * s.averaged_noise_var() / (p.n_y - p.n_x);
    EXPECT_FALSE(at(lin - e).lb);
    EXPECT_TRUE(at(lin + e).lb);
    EXPECT_TRUE(at(lb_hi - e).lb);
    EXPECT_FALSE(at(lb_hi + e).lb);
    EXPECT_FALSE(at(lb_hi + e).lb_reason.empty());
}

TEST(RateBounds, Asymptotic) {
    const auto g = rate_loss_asymptotic(make_gaussian(0, 1), 1.0, 0.5);
    ASSERT_TRUE(g.lb_inf);
    EXPECT_NEAR(*g.lb_inf, 0.5, 1e-8);
    EXPECT_NEAR(g.ub_inf, 0.5, 1e-12);
    EXPECT_NEAR(g.ub_prev_inf, 0.5 + 0.5 * std::log(1.0 + 1.0 * (0.5 + 2.0 * std::sqrt(0.5))), 1e-12);

    const auto lap = make_laplace(1.0);
    const double nx = std::exp(2.0 * (1.0 + std::log(2.0 / M_SQRT2))) / (2.0 * M_PI * M_E);
    const auto l = rate_loss_asymptotic(lap, 1.0, 0.4);
    ASSERT_TRUE(l.lb_inf);
    EXPECT_NEAR(*l.lb_inf, 0.5 * (2.5 - 2.0) - 0.5 * std::log(1.0 / nx), 1e-7);
    EXPECT_FALSE(rate_loss_asymptotic(lap, 1.0, 0.6).lb_inf);

    // branch switch at D = N(X) is continuous
    const auto lo = rate_loss_asymptotic(lap, 1.0, nx * (1.0 - 1e-10));
    const auto hi = rate_loss_asymptotic(lap, 1.0, nx * (1.0 + 1e-10));
    EXPECT_NEAR(lo.ub_inf, hi.ub_inf, 1e-8);
    EXPECT_NEAR(lo.ub_inf, 0.5 * std::log(1.0 / nx) + 0.5 * (1.0 / nx - 1.0), 1e-8);

    EXPECT_THROW(rate_loss_asymptotic(make_uniform_zero_mean(1.0), 1.0, 0.5), UnsupportedInputError);
    EXPECT_THROW(rate_loss_asymptotic(lap, 1.0, 1.5), DomainError);

    // the infinite-agent setting routes through the same closed forms
    const auto r = rate_loss_bounds(CEOSetting::infinite(lap, 1.0), 0.4);
    EXPECT_DOUBLE_EQ(*r.lb, *l.lb_inf);
    EXPECT_DOUBLE_EQ(*r.ub_thm9, l.ub_inf);
    EXPECT_DOUBLE_EQ(*r.ub_thm10, l.ub_inf);
    EXPECT_DOUBLE_EQ(*r.ub_prev, l.ub_prev_inf);
    const auto ru = rate_loss_bounds(CEOSetting::infinite(make_uniform_zero_mean(1.0), 1.0), 0.4);
    EXPECT_FALSE(ru.lb);
    EXPECT_TRUE(ru.ub_thm10);
}

TEST(RateBounds, LargeMApproachesLimit) {
    // away from the lower window edge the finite-M bound converges at rate O(1/M)
    const auto lap = make_laplace(1.0);
    for (double d : {0.2, 0.5, 0.8}) {
        const double lim = rate_loss_asymptotic(lap, 1.0, d).ub_inf;
        const double e3 = std::abs(*rate_loss_bounds(CEOSetting::finite(lap, 1.0, 1000), d).ub_thm9 - lim);
        const double e4 = std::abs(*rate_loss_bounds(CEOSetting::finite(lap, 1.0, 10000), d).ub_thm9 - lim);
        EXPECT_LE(e4, 1e-3) << "D=" << d;
        EXPECT_LT(e4, e3) << "D=" << d;
    }
    // the gaussian exact loss limit is computed without cancellation
    const auto s = CEOSetting::finite(make_gaussian(0, 1), 1.0, 100000000);
    EXPECT_NEAR(*rate_loss_bounds(s, 0.5).gauss_exact, 0.5, 1e-7);
}

TEST(RateBounds, Kappa) {
    for (double v : {0.5, 1.0, 4.0}) EXPECT_NEAR(kappa(make_gaussian(0, v)).value, 1.0, 1e-6);
    const double kl = kappa(make_laplace(1.0)).value;
    EXPECT_NEAR(kl, 2.0 * std::exp(2.0 * (1.0 + std::log(M_SQRT2))) / (2.0 * M_PI * M_E), 1e-6);
    EXPECT_NEAR(kappa(make_affine(make_laplace(1.0), 1.0, 3.0)).value, kl, 1e-8);
    EXPECT_THROW(kappa(make_uniform_zero_mean(1.0)), UnsupportedInputError);
    EXPECT_THROW(kappa(make_exponential_shifted(1.0)), UnsupportedInputError);
    EXPECT_THROW(kappa(make_triangular(1.0)), UnsupportedInputError);
}

TEST(RateBounds, KappaFiniteDifference) {
    const auto g = kappa_check(make_gaussian(0, 1));
    EXPECT_NEAR(g.fd_s1e3, 1.0, 1e-4);
    EXPECT_NEAR(g.fd_limit, 1.0, 1e-4);
    const auto l = kappa_check(make_laplace(1.0));
    EXPECT_LT(l.rel_diff, 0.02) << "fd=" << l.fd_limit << " kappa=" << l.kappa.value;
    EXPECT_LT(std::abs(l.fd_limit - l.kappa.value), std::abs(l.fd_s1e4 - l.kappa.value));
}

TEST(RateBounds, CurveAndGrid) {
    const auto g = distortion_grid(0.25, 1.0, 11);
    EXPECT_NEAR(g.front(), 0.25 + 0.75e-6, 1e-15);
    EXPECT_NEAR(g.back(), 1.0 - 0.75e-6, 1e-15);
    for (std::size_t i = 1; i < g.size(); ++i) EXPECT_GT(g[i], g[i - 1]);
    EXPECT_NEAR(g[5], std::sqrt(g.front() * g.back()), 1e-12);
    EXPECT_THROW(distortion_grid(0.0, 1.0, 5), ParameterError);
    EXPECT_THROW(distortion_grid(1.0, 1.0, 5), ParameterError);
    EXPECT_THROW(distortion_grid(0.1, 1.0, 1), ParameterError);

    const auto s = CEOSetting::finite(make_laplace(1.0), 1.0, 2);
    const auto rows = rate_curve(s, distortion_grid(0.05, 1.2, 25));
    ASSERT_EQ(rows.size(), 25u);
    for (const auto& r : rows) {
        // the rate-loss lower bound and the second branch of ub_thm9 may be negative
        for (const auto& v : {r.remote_lb1, r.remote_lb2, r.coop_tight, r.coop_weak, r.ceo_ub, r.loss.ub_thm10,
                              r.loss.ub_prev, r.loss.gauss_exact}) {
            if (v) {
                EXPECT_GE(*v, -1e-9) << "D=" << r.d;
            }
        }
        EXPECT_EQ(r.ceo_ub.has_value(), r.d > s.linear_mmse());
    }
    EXPECT_THROW(CEOSetting::finite(make_laplace(1.0), 1.0, 0), ParameterError);
    EXPECT_THROW(CEOSetting::finite(make_laplace(1.0), 0.0, 2), ParameterError);
}

TEST(RateBounds, RowErrorsFollowPresence) {
    const auto s = CEOSetting::finite(make_laplace(1.0), 1.0, 3);
    const auto p = ceo_powers(s);
    for (double d : {0.3, 0.6, 0.9}) {
        const auto row = rate_row(s, p, d);
        const auto err = rate_row_error(s, p, d);
        EXPECT_EQ(row.loss.ub_thm10.has_value(), err.loss.ub_thm10.has_value());
        EXPECT_EQ(row.remote_lb1.has_value(), err.remote_lb1.has_value());
        if (err.loss.ub_thm10) {
            EXPECT_GE(*err.loss.ub_thm10, 0.0);
            EXPECT_LT(*err.loss.ub_thm10, 1e-5);
        }
        // the Gaussian reference has no numerical input
        if (err.loss.gauss_exact) EXPECT_EQ(*err.loss.gauss_exact, 0.0);
    }
    // larger power errors give larger row errors
    auto q = p;
    q.abs_error = 100.0 * p.abs_error + 1e-6;
    const auto e1 = rate_row_error(s, p, 0.6), e2 = rate_row_error(s, q, 0.6);
    ASSERT_TRUE(e2.remote_lb1);
    EXPECT_GT(*e2.remote_lb1, *e1.remote_lb1);
}
