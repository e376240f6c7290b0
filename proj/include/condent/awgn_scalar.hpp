#pragma once
// Scalar channel Y = X + W, W ~ N(0, noise_var): posterior statistics and the
// output-side expectations behind h(E[X|Y]).

#include <cstdint>

#include "condent/distributions.hpp"
#include "condent/estimate.hpp"

namespace condent {

class ScalarChannel {
public:
    ScalarChannel(InputDistribution input, double noise_var);
    const InputDistribution& input() const { return input_; }
    double noise_var() const { return noise_var_; }
    double output_var() const { return input_.variance() + noise_var_; }
    // sigma_X^2 sigma_W^2 / sigma_Y^2, the error of the best linear estimator
    double linear_mmse() const { return input_.variance() * noise_var_ / output_var(); }

private:
    InputDistribution input_;
    double noise_var_;
};

struct PosteriorPoint {
    double y = 0.0;
    double density = 0.0;  // p_Y(y)
    double score = 0.0;    // d/dy log p_Y(y)
    double cond_mean = 0.0;
    double cond_var = 0.0;
};

inline constexpr double kFarTailFloor = 1e-300;

struct MarginalDensity {
    double value = 0.0;      // p_Y(y), or kFarTailFloor when far_tail
    double log_value = 0.0;  // log p_Y(y) (finite even past the floor)
    bool far_tail = false;
};

MarginalDensity marginal_density(const ScalarChannel& ch, double y);
double marginal_pdf(const ScalarChannel& ch, double y);

// Direct posterior quadrature. Throws TailError when p_Y(y) is below the floor.
PosteriorPoint posterior_point(const ScalarChannel& ch, double y);
double cond_mean(const ScalarChannel& ch, double y);

// One adaptive pass over y of every output-side functional the bounds need.
struct OutputSummary {
    EstimateWithError mass;            // int p_Y (should be 1)
    EstimateWithError h_y;             // h(Y)
    EstimateWithError e_log_cond_var;  // E[log Var(X|Y)]
    EstimateWithError mmse;            // E[Var(X|Y)]
    EstimateWithError var_cond_var;    // Var(Var(X|Y)), the c2 of the Taylor expansion
    EstimateWithError var_cond_mean;   // Var(E[X|Y]) integrated directly
    int floor_hits = 0;                // cond_var values clipped at kCondVarFloor
};

inline constexpr double kCondVarFloor = 1e-150;

OutputSummary summarize_output(const ScalarChannel& ch);

EstimateWithError mmse(const ScalarChannel& ch);
// sigma_X^2 - mmse (the direct integral is in OutputSummary::var_cond_mean)
EstimateWithError var_cond_mean(const ScalarChannel& ch);
// entropy_from_pdf over the marginal density
EstimateWithError output_entropy(const ScalarChannel& ch);
// h(Y) + E[log Var(X|Y)] - log sigma_W^2
EstimateWithError entropy_cond_mean(const ScalarChannel& ch);
// kNN entropy of E[X|Y_i] over n sampled outputs
EstimateWithError entropy_cond_mean_sampled(const ScalarChannel& ch, std::size_t n_samples, std::uint64_t seed);

struct EntropyReport {
    EstimateWithError h_x;
    EstimateWithError h_y;
    EstimateWithError h_cond_mean;
    EstimateWithError mmse;
    EstimateWithError var_cond_mean;
    EstimateWithError var_cond_mean_direct;
    EstimateWithError e_log_cond_var;
    EstimateWithError var_cond_var;
    EstimateWithError lower_main;  // 2h(X) - h(Y)
    EstimateWithError ub_jensen;   // h(Y) + log(mmse / sigma_W^2)
    EstimateWithError ub_linear;   // h(Y) + log(sigma_X^2 / sigma_Y^2)
    EstimateWithError ub_maxent;   // 1/2 log(2 pi e sigma_X^4 / sigma_Y^2)
    int floor_hits = 0;
};

EntropyReport entropy_report(const ScalarChannel& ch);

}  // namespace condent
