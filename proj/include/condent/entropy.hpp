#pragma once
// Differential entropy of a density by quadrature, and the Kozachenko-Leonenko
// nearest-neighbour estimator used as an independent sampling oracle.

#include <cstdint>
#include <functional>
#include <vector>

#include "condent/estimate.hpp"
#include "condent/quadrature.hpp"

namespace condent {

// p log p is taken as 0 where p falls below this.
inline constexpr double kPdfFloor = 1e-300;

// -int p log p over support, nats. Breakpoints/tail scale in `hints` help
// the integrator when the density has kinks or an unusual scale.
EstimateWithError entropy_from_pdf(const std::function<double(double)>& pdf, Interval support, double tol);
EstimateWithError entropy_from_pdf(const std::function<double(double)>& pdf, Interval support, double tol,
                                   const IntegrationOptions& hints);

inline constexpr int kKnnDefaultK = 4;
inline constexpr int kKnnBootstrap = 20;

// samples stored row-major, `dim` values per sample. abs_error is the bootstrap
// standard error of the per-point log-distance average (20 resamples, seeded).
EstimateWithError knn_entropy(const std::vector<double>& samples, int dim, int k = kKnnDefaultK,
                              std::uint64_t seed = 0x6b6e6eULL);
EstimateWithError knn_entropy(const std::vector<std::vector<double>>& samples, int k = kKnnDefaultK,
                              std::uint64_t seed = 0x6b6e6eULL);

}  // namespace condent
