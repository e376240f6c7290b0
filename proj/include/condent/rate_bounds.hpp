#pragma once
// Remote rate-distortion lower bounds and CEO rate-loss bounds for the
// Gaussian-noise observation model. All rates in nats.

#include <optional>
#include <string>
#include <vector>

#include "condent/awgn_scalar.hpp"

namespace condent {

double log_plus(double x);

// M encoders, each seeing X + W_i with W_i ~ N(0, noise_var). infinite_agents
// selects the closed-form M -> infinity limits.
struct CEOSetting {
    InputDistribution input;
    double noise_var = 1.0;
    int agents = 1;
    bool infinite_agents = false;

    static CEOSetting finite(InputDistribution input, double noise_var, int agents);
    static CEOSetting infinite(InputDistribution input, double noise_var);

    double averaged_noise_var() const;  // sigma_W^2 / M (0 for M = infinity)
    // sigma_X^2 (sigma_W^2/M) / (sigma_X^2 + sigma_W^2/M)
    double linear_mmse() const;
    // the channel seen by a fully cooperating encoder, Y(M) = X + mean of W_i
    ScalarChannel averaged_channel() const;
};

// Entropy powers and mmse of the averaged channel, computed once per setting.
struct ChannelPowers {
    double var_x = 0.0;
    double noise_var = 0.0;  // of the averaged channel
    double n_x = 0.0;
    double n_y = 0.0;
    double n_cond_mean = 0.0;
    double mmse = 0.0;
    double abs_error = 0.0;  // error scale of the entropy powers and mmse
};
ChannelPowers channel_powers(const ScalarChannel& ch);
// Powers of the setting: the averaged channel for finite M, N(X) alone for M = infinity.
ChannelPowers ceo_powers(const CEOSetting& s);

struct RemoteLowerBounds {
    double lb1 = 0.0;  // via N(E[X|Y]) and N(Y)
    double lb2 = 0.0;  // via N(X) and N(Y)
    double abs_error = 0.0;
};
// Requires D > mmse; throws DomainError otherwise.
RemoteLowerBounds remote_lower_bounds(const ChannelPowers& p, double d);
RemoteLowerBounds remote_lower_bounds(const ScalarChannel& ch, double d);

struct CoopBounds {
    std::optional<double> tight;
    std::optional<double> weak;
    std::string tight_reason, weak_reason;  // set when absent
};
CoopBounds coop_bounds(const CEOSetting& s, const ChannelPowers& p, double d);
CoopBounds coop_bounds(const CEOSetting& s, double d);

// Upper bound on the CEO sum rate; DomainError below sigma_X^2 (sigma_W^2/M) / sigma_Y(M)^2.
double ceo_sum_rate_ub(const CEOSetting& s, double d);

struct RateLoss {
    std::optional<double> lb, ub_thm9, ub_thm10, ub_prev, gauss_exact;
    // why a bound is absent, empty when present
    std::string lb_reason, thm9_reason, thm10_reason, prev_reason, gauss_reason;
};
RateLoss rate_loss_bounds(const CEOSetting& s, const ChannelPowers& p, double d);
RateLoss rate_loss_bounds(const CEOSetting& s, double d);

struct RateLossAsymptotic {
    std::optional<double> lb_inf;  // absent for D >= 1/J(X)
    double ub_inf = 0.0;
    double ub_prev_inf = 0.0;
};
// Throws UnsupportedInputError when J(X) is not finite, DomainError outside (0, sigma_X^2).
RateLossAsymptotic rate_loss_asymptotic(const InputDistribution& input, double noise_var, double d);

// kappa_X = N(X) J(X)
EstimateWithError kappa(const InputDistribution& input);

struct KappaCheck {
    EstimateWithError kappa;  // N(X) J(X)
    double fd_limit = 0.0;    // Richardson-extrapolated d/ds N(X + sqrt(s) G) at s -> 0
    double fd_s1e3 = 0.0;     // (N(X + sqrt(s) G) - N(X)) / s at s = 1e-3
    double fd_s1e4 = 0.0;
    double rel_diff = 0.0;
};
KappaCheck kappa_check(const InputDistribution& input);

struct RateRow {
    double d = 0.0;
    std::optional<double> remote_lb1, remote_lb2, coop_tight, coop_weak, ceo_ub;
    RateLoss loss;
};

// Log-spaced D grid on (lo, hi) with endpoint insets of 1e-6 (hi - lo).
std::vector<double> distortion_grid(double lo, double hi, int n);

// Every curve at one D; bounds outside their windows are absent.
RateRow rate_row(const CEOSetting& s, const ChannelPowers& p, double d);
// Error of each present field of rate_row: the entropy powers and mmse are
// moved by +-abs_error one at a time and the largest shifts combined in quadrature.
RateRow rate_row_error(const CEOSetting& s, const ChannelPowers& p, double d);
// Every curve at each D; bounds outside their windows are absent.
std::vector<RateRow> rate_curve(const CEOSetting& s, const std::vector<double>& d_grid);

inline const char* kRateCsvHeader =
    "D,remote_lb1,remote_lb2,coop_tight,coop_weak,ceo_ub,loss_lb,loss_ub_thm9,loss_ub_thm10,loss_ub_prev,loss_gauss_exact";

}  // namespace condent
