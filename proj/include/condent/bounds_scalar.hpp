#pragma once
// Scalar bounds on h(E[X|Y]) and related approximations, evaluated against the
// quadrature pipeline of awgn_scalar.

#include <functional>
#include <string>
#include <vector>

#include "condent/awgn_scalar.hpp"

namespace condent {

struct BoundsReport {
    EstimateWithError truth;  // h(E[X|Y])
    EstimateWithError lower_main;
    EstimateWithError ub_jensen;
    EstimateWithError ub_linear;
    EstimateWithError ub_maxent;
    // truth minus bound, and the combined comparison tolerance for each
    double gap_lower = 0.0, gap_jensen = 0.0, gap_linear = 0.0, gap_maxent = 0.0;
    double tol_lower = 0.0, tol_jensen = 0.0, tol_linear = 0.0, tol_maxent = 0.0;
    EntropyReport detail;
};

BoundsReport bounds_report(const ScalarChannel& ch);
BoundsReport bounds_from(const EntropyReport& r);

// Relations of lower_main <= truth <= ub_jensen <= ub_linear <= ub_maxent that
// fail beyond tolerance, as readable strings; empty when the chain holds.
std::vector<std::string> sandwich_violations(const BoundsReport& b);

struct FisherBounds {
    double j_truth_lb = 0.0;  // 1/N(E[X|Y])
    double j_closed = 0.0;    // (sigma_X^2 + sigma_W^2)/sigma_X^4
};
FisherBounds fisher_bounds(const ScalarChannel& ch);

struct TaylorApprox {
    EstimateWithError approx;  // ub_jensen - c2/(2 mmse^2)
    EstimateWithError c2;      // Var(Var(X|Y))
    EstimateWithError ub_jensen;
    EstimateWithError truth;
};
TaylorApprox taylor_approx(const ScalarChannel& ch);

// h(E[X|Y]) / log sigma_X^2 along a decreasing grid of input variances below noise_var.
std::vector<double> asymptotic_ratio_low_var(const std::function<InputDistribution(double)>& family,
                                             const std::vector<double>& var_grid, double noise_var);

struct EPIComparison {
    double alpha = 0.0;
    double n_y_alpha = 0.0;  // N(X + alpha W)
    double lb_main = 0.0;    // alpha^2 sigma_W^2 N(X) exp(-E[log Var(X|Y_alpha)])
    double lb_costa = 0.0;   // (1 - alpha^2) N(X) + alpha^2 N(Y_1)
    double gap_main = 0.0;
    double gap_costa = 0.0;
    double abs_error = 0.0;  // error scale of the gaps
};
EPIComparison costa_comparison(const InputDistribution& input, double noise_var, double alpha);

}  // namespace condent
