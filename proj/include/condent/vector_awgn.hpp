#pragma once
// Vector channel Y = A X + W, W ~ N(0, K_W), n <= 3.
// Inputs are linear images X = L Z + m of independent scalar coordinates Z,
// which gives h(X) in closed form and reduces posterior integrals over x to
// integrals over z.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "condent/distributions.hpp"
#include "condent/estimate.hpp"

namespace condent {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

inline constexpr int kMaxVectorDim = 3;

class VectorInput {
public:
    // X = L Z + shift, Z_i ~ factors[i] independent
    VectorInput(std::vector<InputDistribution> factors, Mat mixing, Vec shift);

    static VectorInput gaussian(const Vec& mean, const Mat& cov);
    static VectorInput product(std::vector<InputDistribution> factors);
    // Two-component Gaussian mixture with correlated components: L (gm2(v1), N(0, v2))
    static VectorInput correlated_gm2(double v1, double v2, const Mat& mixing);

    int dim() const { return static_cast<int>(factors_.size()); }
    const std::vector<InputDistribution>& factors() const { return factors_; }
    const Mat& mixing() const { return L_; }
    const Vec& shift() const { return m_; }
    Vec mean() const;
    Mat cov() const;
    double log_pdf(const Vec& x) const;
    // sum h(Z_i) + log |det L|
    EstimateWithError entropy() const;
    // n draws, row-major (n x dim); a pure function of seed
    std::vector<double> sample(std::uint64_t seed, std::size_t n) const;
    bool is_gaussian() const;
    std::string spec() const;

private:
    std::vector<InputDistribution> factors_;
    Mat L_;
    Vec m_;
    Mat L_inv_;
    double log_abs_det_L_ = 0.0;
};

class VectorChannel {
public:
    // Checks det A != 0 (condition number < 1e10), K_W symmetric positive
    // definite and K_X condition number < 1e8.
    VectorChannel(VectorInput input, Mat A, Mat K_W);

    int dim() const { return input_.dim(); }
    const VectorInput& input() const { return input_; }
    const Mat& A() const { return A_; }
    const Mat& K_W() const { return K_W_; }
    Mat output_cov() const;  // A K_X A^T + K_W
    Vec output_mean() const;
    double log_abs_det_A() const { return log_abs_det_A_; }
    double log_det_K_W() const { return log_det_K_W_; }
    std::string spec() const;

    // precomputed in the z frame: B = A L, P = B^T K_W^-1 B
    const Mat& B() const { return B_; }
    const Mat& B_inv() const { return B_inv_; }
    const Mat& P() const { return P_; }
    const Mat& K_W_inv() const { return K_W_inv_; }

private:
    VectorInput input_;
    Mat A_, K_W_;
    Mat B_, B_inv_, P_, K_W_inv_;
    double log_abs_det_A_ = 0.0;
    double log_det_K_W_ = 0.0;
};

struct VectorOptions {
    std::size_t knn_samples = 1'000'000;
    int knn_k = 4;
    std::size_t y_samples = 4000;       // Monte Carlo over Y for the log det and MMSE averages, floored at 1000
    std::size_t particles = 100'000;    // importance sampling, n = 3
    double min_ess = 1000.0;
    double rel_tol = 1e-10;             // tensor quadrature, n <= 2
    std::uint64_t seed = 0x5eed0001ULL;
};

struct PosteriorField {
    Vec cond_mean;
    Mat cond_cov;
    double density = 0.0;  // p_Y(y)
    double log_density = 0.0;
    Vec mean_error;        // per coordinate
    double ess = 0.0;      // importance sampling only
    Method method = Method::quadrature;
};

// n <= 2: tensor-product quadrature; n = 3: self-normalized importance sampling.
// y must lie in the 8-sigma ellipsoid of Y (DomainError otherwise);
// ResolutionError when the effective sample size falls below opt.min_ess.
PosteriorField posterior_field(const VectorChannel& ch, const Vec& y, const VectorOptions& opt = {});

struct VectorSummary {
    int dim = 0;
    EstimateWithError h_x, h_y;
    EstimateWithError e_log_det;    // E[log det(A K_W^-1 Var(X|Y))]
    EstimateWithError truth;        // h(E[X|Y]) = h(Y) + e_log_det
    EstimateWithError truth_knn;    // kNN entropy of sampled E[X|Y]
    bool cross_check_ok = false;    // |truth - truth_knn| within combined tolerance
    Mat mmse, mmse_error;           // E[Var(X|Y)], elementwise standard errors
    Mat cov_cond_mean;              // Cov(E[X|Y])
    Mat total_var_error;            // standard errors of mmse + cov_cond_mean
    EstimateWithError log_det_mmse;
    EstimateWithError lower_main;   // 2h(X) - h(Y) + log|det A|
    EstimateWithError ub_jensen;    // h(Y) + log det MMSE + log det(A K_W^-1)
    EstimateWithError ub_maxent;    // 1/2 log((2 pi e)^n det Cov(Y)) + log det MMSE + log det(A K_W^-1)
    std::optional<double> gaussian_closed_form;
    std::size_t y_samples = 0, knn_samples = 0;
};

VectorSummary vector_summary(const VectorChannel& ch, const VectorOptions& opt = {});
EstimateWithError entropy_cond_mean_vec(const VectorChannel& ch, const VectorOptions& opt = {});

struct VectorBounds {
    EstimateWithError lower_main, ub_jensen, ub_maxent, truth;
};
VectorBounds vector_bounds(const VectorChannel& ch, const VectorOptions& opt = {});

// 1/2 log det(2 pi e (A K_X)^2 (A K_X A^T + K_W)^-1), the Gaussian-input value
double gaussian_cond_mean_entropy(const Mat& A, const Mat& K_X, const Mat& K_W);

struct JacobianCheck {
    Mat fd;           // J_ij = d E[X_j|Y=y] / d y_i by central differences
    Mat standard;     // K_W^-1 A Var(X|Y=y)
    Mat printed;      // A^-1 K_W^-1 A Var(X|Y=y) A^T
    double rel_err_standard = 0.0;  // Frobenius, relative to the prediction
    double rel_err_printed = 0.0;
    double det_rel_err = 0.0;       // |det fd - det standard| / |det standard|
};
JacobianCheck jacobian_check(const VectorChannel& ch, const Vec& y, const VectorOptions& opt = {});

}  // namespace condent
