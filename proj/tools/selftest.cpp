// Quick invariant suite behind `condent selftest`. Output depends only on the
// seed, so two runs can be diffed byte for byte.

#include <cmath>

#include "commands.hpp"
#include "condent/awgn_scalar.hpp"
#include "condent/bounds_scalar.hpp"
#include "condent/errors.hpp"
#include "condent/expofam.hpp"
#include "condent/format.hpp"
#include "condent/rate_bounds.hpp"
#include "condent/special.hpp"
#include "condent/vector_awgn.hpp"

namespace condent::cli {

namespace {

class Suite {
public:
    void check(const std::string& name, bool ok, const std::string& detail) {
        out_ += std::string(ok ? "PASS " : "FAIL ") + name + ": " + detail + "\n";
        ++total_;
        if (!ok) failed_.push_back(name);
    }
    const std::string& text() const { return out_; }
    int total() const { return total_; }
    const std::vector<std::string>& failed() const { return failed_; }

private:
    std::string out_;
    int total_ = 0;
    std::vector<std::string> failed_;
};

std::string num(double x) { return shortest(x); }

std::vector<std::string> catalog_at(double var) {
    std::vector<std::string> out;
    for (const auto& n : catalog_names())
        if (n != "gm2" || var > 1.0) out.push_back(n);
    return out;
}

void distribution_checks(Suite& s, std::uint64_t seed) {
    for (const auto& n : catalog_at(2.0)) {
        const auto d = make_catalog(n, 2.0);
        const double mass = expect(d, [](double) { return 1.0; }).value;
        const double m = expect(d, [](double x) { return x; }).value;
        const double v = expect(d, [&](double x) { return (x - d.mean()) * (x - d.mean()); }).value;
        const bool ok = std::abs(mass - 1.0) < 1e-8 && std::abs(m - d.mean()) < 1e-8 && std::abs(v - 2.0) < 1e-7;
        s.check("moments " + n, ok, "mass " + num(mass) + " mean " + num(m) + " var " + num(v));
        const auto a = d.sample(seed, 64), b = d.sample(seed, 64);
        s.check("sampler determinism " + n, a == b, "64 draws, seed " + std::to_string(seed));
    }
}

void scalar_checks(Suite& s) {
    for (double v : {0.25, 1.0, 4.0}) {
        const auto r = entropy_report(ScalarChannel(make_gaussian(0.0, v), 1.0));
        const double closed = 0.5 * std::log(2.0 * M_PI * M_E * v * v / (v + 1.0));
        const bool ok = std::abs(r.h_cond_mean.value - r.lower_main.value) <= 1e-4 &&
                        std::abs(r.h_cond_mean.value - closed) <= 1e-4;
        s.check("gaussian equality var=" + num(v), ok,
                "h " + num(r.h_cond_mean.value) + " lower " + num(r.lower_main.value) + " closed " + num(closed));
    }
    const double h_gauss = bounds_report(ScalarChannel(make_gaussian(0.0, 2.0), 1.0)).truth.value;
    for (const auto& n : catalog_at(2.0)) {
        const ScalarChannel ch(make_catalog(n, 2.0), 1.0);
        const auto b = bounds_report(ch);
        const auto v = sandwich_violations(b);
        s.check("sandwich " + n, v.empty(),
                v.empty() ? num(b.lower_main.value) + " <= " + num(b.truth.value) + " <= " + num(b.ub_jensen.value) +
                                " <= " + num(b.ub_linear.value) + " <= " + num(b.ub_maxent.value)
                          : v.front());
        const auto& r = b.detail;
        const double tv = r.mmse.value + r.var_cond_mean_direct.value;
        s.check("total variance " + n, std::abs(tv - 2.0) <= 1e-5, "mmse + Var(E[X|Y]) = " + num(tv));
        if (n != "gaussian")
            s.check("gaussian maximizes " + n, b.truth.value < h_gauss - 1e-3,
                    num(b.truth.value) + " < " + num(h_gauss));

        const double nv = ch.noise_var(), sy = std::sqrt(ch.output_var());
        auto logp = [&](double t) { return marginal_density(ch, t).log_value; };
        auto cm = [&](double t) { return cond_mean(ch, t); };
        double worst_t = 0.0, worst_h = 0.0;
        for (double y : {-2.0 * sy, -0.5 * sy, 0.3 * sy, 1.5 * sy, 3.0 * sy}) {
            const auto p = posterior_point(ch, y);
            const double tw = y + nv * richardson_first(logp, y, 3e-3 * sy);
            worst_t = std::max(worst_t, std::abs(tw - p.cond_mean) / (1.0 + std::abs(p.cond_mean)));
            const double hn = nv * central_diff(cm, y, 1e-4 * sy);
            worst_h = std::max(worst_h, std::abs(hn - p.cond_var) / (1.0 + p.cond_var));
        }
        s.check("tweedie " + n, worst_t <= 1e-8, "max rel err " + num(worst_t));
        s.check("hatsell-nolte " + n, worst_h <= 1e-4, "max rel err " + num(worst_h));
    }
}

void oracle_checks(Suite& s, std::uint64_t seed) {
    const ScalarChannel ch(make_laplace(2.0), 1.0);
    const auto q = entropy_cond_mean(ch);
    const auto m = entropy_cond_mean_sampled(ch, 100'000, seed);
    s.check("sampled oracle laplace", std::abs(q.value - m.value) <= 0.05,
            "quadrature " + num(q.value) + " sampled " + num(m.value) + " (1e5 samples)");
}

void rate_checks(Suite& s) {
    const auto g = CEOSetting::finite(make_gaussian(0.0, 1.0), 1.0, 2);
    const auto loss = rate_loss_bounds(g, 0.75);
    const double v = loss.ub_thm10.value_or(NAN);
    s.check("gaussian rate loss M=2 D=0.75", std::abs(v - 0.09116) <= 1e-5, "ub_thm10 " + num(v));
    // Gaussian equality needs mmse < D < N(E[X|Y]), an empty window at sigma_X^2 = 1
    for (const char* n : {"gaussian", "laplace"}) {
        const bool gauss = std::string(n) == "gaussian";
        const ScalarChannel ch(make_catalog(n, gauss ? 4.0 : 1.0), 1.0);
        const auto r = remote_lower_bounds(ch, gauss ? 2.0 : 0.8);
        const bool ok = gauss ? std::abs(r.lb1 - r.lb2) <= 1e-6 : r.lb1 >= r.lb2 - combined_tolerance({r.abs_error});
        s.check(std::string("remote lb1 vs lb2 ") + n, ok, "lb1 " + num(r.lb1) + " lb2 " + num(r.lb2));
    }
    const double k = kappa(make_gaussian(0.0, 1.0)).value;
    s.check("kappa gaussian", std::abs(k - 1.0) <= 1e-6, "kappa " + num(k));
}

void expofam_checks(Suite& s) {
    const double g1 = beta_prime_gap(1.0);
    s.check("beta-prime gap d=1", std::abs(g1 - (std::log(2.0 * M_PI * M_E) - 2.0)) <= 1e-12, "gap " + num(g1));
    const auto t = thm7_lower_bound(ExpoFamChannel(make_beta_prime(4.0, 3.0), gamma_family(4.0)));
    s.check("beta-prime numeric gap d=1", std::abs(t.gap - g1) <= 1e-3, "truth - bound " + num(t.gap));
}

void vector_checks(Suite& s) {
    Mat kx(2, 2), kw(2, 2);
    kx << 1.0, 0.3, 0.3, 0.5;
    kw << 0.5, 0.1, 0.1, 0.8;
    const VectorChannel ch(VectorInput::gaussian(Vec::Zero(2), kx), Mat::Identity(2, 2), kw);
    Vec y(2);
    y << 0.7, -0.4;
    const auto f = posterior_field(ch, y);
    const Mat gain = kx * (kx + kw).inverse();
    const double err = (f.cond_mean - gain * y).norm() + (f.cond_cov - (kx - gain * kx)).norm();
    s.check("vector gaussian posterior", err <= 1e-8, "deviation " + num(err));
    const auto jc = jacobian_check(ch, y);
    s.check("vector jacobian", jc.rel_err_standard <= 1e-3 && jc.rel_err_printed <= 1e-3,
            "rel err " + num(jc.rel_err_standard));
}

}  // namespace

int run_selftest(const Common& c) {
    Suite s;
    distribution_checks(s, c.seed);
    scalar_checks(s);
    oracle_checks(s, c.seed);
    rate_checks(s);
    expofam_checks(s);
    vector_checks(s);
    std::string text = s.text();
    text += std::to_string(s.total() - static_cast<int>(s.failed().size())) + "/" + std::to_string(s.total()) +
            " properties passed (seed " + std::to_string(c.seed) + ")\n";
    emit(text, c.out);
    if (!s.failed().empty() && c.strict) {
        std::string all;
        for (const auto& f : s.failed()) all += (all.empty() ? "" : ", ") + f;
        throw IdentityViolation("selftest failures: " + all);
    }
    return 0;
}

}  // namespace condent::cli
