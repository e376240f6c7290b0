#pragma once
// Adaptive quadrature of a sharply peaked, log-evaluated weight exp(l(x)) with
// its first two centred moments and optional payload averages. Shared by the
// posterior integrals of the exponential-family and vector channels.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "condent/quadrature.hpp"

namespace condent {

struct PeakedProblem {
    // log weight at x = origin + t; offsets keep a finite edge free of cancellation
    std::function<double(double)> log_w_t;
    Interval dom;
    double origin = 0.0;
    std::vector<double> candidates;  // probe points in x
    std::vector<double> landmarks;   // extra breakpoints in x
    double ref_scale = 1.0;          // typical width
    double walk_start = 0.0;         // first step of the walk out of the mode; 0 picks 1e-9 max(|mode|, ref_scale)
    double mode_rel_tol = 1e-12;     // golden-section stop, relative to max(1, |mode|)
    bool sqrt_lo = false, sqrt_hi = false;
    int tail_power = 1;
    double rel_tol = 1e-12;
};

enum class PeakStatus { ok, no_mass, diverges, not_converged };

template <std::size_t K>
struct PeakedResult {
    PeakStatus status = PeakStatus::ok;
    double log_mass = 0.0;  // log int exp(l)
    double mean = 0.0, var = 0.0;
    std::array<double, K> payload{};  // weighted averages
    double mean_err = 0.0;
    std::array<double, K> payload_err{};
};

// Landmarks, a spread of mean +- k sd and, off each finite edge, a fine scan
// (bounded domain) or a geometric ladder (half line / line).
// The ladder runs over sd 2^k, k in [ladder_min, ladder_max].
std::vector<double> peak_candidates(Interval dom, double mean, double sd, const std::vector<double>& landmarks,
                                    int ladder_min = -40, int ladder_max = 80, int scan_points = 128);

namespace detail {

struct PeakFrame {
    double lmax = 0.0, mode = 0.0, scale = 1.0;
    IntegrationOptions opt;
    PeakStatus status = PeakStatus::ok;
};

// Mode search, mass region and breakpoints (returned in t coordinates).
PeakFrame locate_peak(const PeakedProblem& p);

}  // namespace detail

template <std::size_t K, class Payload>
PeakedResult<K> integrate_peaked(const PeakedProblem& p, Payload&& payload) {
    PeakedResult<K> out;
    const detail::PeakFrame fr = detail::locate_peak(p);
    if (fr.status != PeakStatus::ok) {
        out.status = fr.status;
        return out;
    }
    const Interval tv{p.dom.lo - p.origin, p.dom.hi - p.origin};
    std::array<double, 3 + K> w{};
    w[0] = 1.0;
    w[1] = 1.0 / fr.scale;
    w[2] = 1.0 / (fr.scale * fr.scale);
    for (std::size_t k = 0; k < K; ++k) w[3 + k] = 1.0;

    // an integrable singularity at an edge can put lmax far above the bulk;
    // one renormalized pass then fixes the shift and the centre
    double shift = fr.lmax, c = fr.mode - p.origin;
    AdaptiveResult<3 + K> r;
    for (int pass = 0; pass < 2; ++pass) {
        auto f = [&](double t) {
            std::array<double, 3 + K> v{};
            const double l = p.log_w_t(t) - shift;
            if (!(l > -745.0)) return v;
            const double e = std::exp(l);
            const double dt = t - c;
            v[0] = e;
            v[1] = e * dt;
            v[2] = e * dt * dt;
            if constexpr (K > 0) {
                const std::array<double, K> g = payload(t);
                for (std::size_t k = 0; k < K; ++k) v[3 + k] = e * g[k];
            }
            return v;
        };
        r = integrate_adaptive<3 + K>(f, tv, fr.opt, w);
        const double m0 = r.value[0];
        if (r.converged || !(m0 > 0.0) || !std::isfinite(m0) || m0 > 1e-3) break;
        shift += std::log(m0);
        c += r.value[1] / m0;
    }
    const double m0 = r.value[0];
    if (!(m0 > 0.0) || !std::isfinite(m0)) {
        out.status = PeakStatus::no_mass;
        return out;
    }
    const double m1 = r.value[1] / m0;
    out.log_mass = shift + std::log(m0);
    out.mean = p.origin + c + m1;
    out.var = std::max(r.value[2] / m0 - m1 * m1, 0.0);
    out.mean_err = r.error[1] / m0;
    for (std::size_t k = 0; k < K; ++k) {
        out.payload[k] = r.value[3 + k] / m0;
        out.payload_err[k] = r.error[3 + k] / m0;
    }
    if (!r.converged) out.status = PeakStatus::not_converged;
    return out;
}

}  // namespace condent
