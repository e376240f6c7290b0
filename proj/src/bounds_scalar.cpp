#include "condent/bounds_scalar.hpp"

#include <cmath>
#include <sstream>

#include "condent/errors.hpp"
#include "condent/special.hpp"

namespace condent {

BoundsReport bounds_from(const EntropyReport& r) {
    BoundsReport b;
    b.detail = r;
    b.truth = r.h_cond_mean;
    b.lower_main = r.lower_main;
    b.ub_jensen = r.ub_jensen;
    b.ub_linear = r.ub_linear;
    b.ub_maxent = r.ub_maxent;
    const double t = b.truth.value;
    const double te = b.truth.abs_error;
    b.gap_lower = t - b.lower_main.value;
    b.gap_jensen = t - b.ub_jensen.value;
    b.gap_linear = t - b.ub_linear.value;
    b.gap_maxent = t - b.ub_maxent.value;
    b.tol_lower = combined_tolerance({te, b.lower_main.abs_error});
    b.tol_jensen = combined_tolerance({te, b.ub_jensen.abs_error});
    b.tol_linear = combined_tolerance({te, b.ub_linear.abs_error});
    b.tol_maxent = combined_tolerance({te, b.ub_maxent.abs_error});
    return b;
}

BoundsReport bounds_report(const ScalarChannel& ch) { return bounds_from(entropy_report(ch)); }

std::vector<std::string> sandwich_violations(const BoundsReport& b) {
    std::vector<std::string> out;
    auto check = [&](const char* what, const EstimateWithError& lo, const EstimateWithError& hi) {
        const double tol = combined_tolerance({lo.abs_error, hi.abs_error});
        if (lo.value > hi.value + tol) {
            std::ostringstream os;
            os.precision(10);
            os << what << ": " << lo.value << " > " << hi.value << " (tol " << tol << ")";
            out.push_back(os.str());
        }
    };
    check("lower_main <= truth", b.lower_main, b.truth);
    check("truth <= ub_jensen", b.truth, b.ub_jensen);
    check("ub_jensen <= ub_linear", b.ub_jensen, b.ub_linear);
    check("ub_linear <= ub_maxent", b.ub_linear, b.ub_maxent);
    return out;
}

FisherBounds fisher_bounds(const ScalarChannel& ch) {
    const double vx = ch.input().variance();
    const double h = entropy_cond_mean(ch).value;
    return {1.0 / entropy_power(h), (vx + ch.noise_var()) / (vx * vx)};
}

TaylorApprox taylor_approx(const ScalarChannel& ch) {
    const auto r = entropy_report(ch);
    TaylorApprox t;
    t.c2 = r.var_cond_var;
    t.ub_jensen = r.ub_jensen;
    t.truth = r.h_cond_mean;
    const double m = r.mmse.value;
    const double corr = t.c2.value / (2.0 * m * m);
    t.approx = {r.ub_jensen.value - corr,
                r.ub_jensen.abs_error + t.c2.abs_error / (2.0 * m * m) + 2.0 * corr * r.mmse.abs_error / m,
                Method::quadrature};
    return t;
}

std::vector<double> asymptotic_ratio_low_var(const std::function<InputDistribution(double)>& family,
                                             const std::vector<double>& var_grid, double noise_var) {
    std::vector<double> out;
    for (std::size_t i = 0; i < var_grid.size(); ++i) {
        const double v = var_grid[i];
        if (!(v > 0.0) || !(v < noise_var))
            throw ParameterError("low-variance grid values must lie in (0, noise_var)");
        if (i > 0 && !(v < var_grid[i - 1])) throw ParameterError("low-variance grid must be strictly decreasing");
        const ScalarChannel ch(family(v), noise_var);
        out.push_back(entropy_cond_mean(ch).value / std::log(v));
    }
    return out;
}

EPIComparison costa_comparison(const InputDistribution& input, double noise_var, double alpha) {
    if (!(alpha > 0.0) || alpha > 1.0) throw ParameterError("alpha must lie in (0, 1]");
    const double a2 = alpha * alpha;
    const auto hx = entropy(input);
    const auto sa = summarize_output(ScalarChannel(input, a2 * noise_var));
    const auto s1 = alpha == 1.0 ? sa : summarize_output(ScalarChannel(input, noise_var));
    const double nx = entropy_power(hx.value);
    EPIComparison c;
    c.alpha = alpha;
    c.n_y_alpha = entropy_power(sa.h_y.value);
    c.lb_main = a2 * noise_var * nx * std::exp(-sa.e_log_cond_var.value);
    c.lb_costa = (1.0 - a2) * nx + a2 * entropy_power(s1.h_y.value);
    c.gap_main = c.n_y_alpha - c.lb_main;
    c.gap_costa = c.n_y_alpha - c.lb_costa;
    // first-order propagation through the exponentials
    c.abs_error = 2.0 * c.n_y_alpha * sa.h_y.abs_error + c.lb_main * (2.0 * hx.abs_error + sa.e_log_cond_var.abs_error) +
                  2.0 * a2 * entropy_power(s1.h_y.value) * s1.h_y.abs_error;
    return c;
}

}  // namespace condent
