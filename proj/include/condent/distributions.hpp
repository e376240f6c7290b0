#pragma once
// Catalog of input laws X behind one value type.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "condent/estimate.hpp"
#include "condent/quadrature.hpp"

namespace condent {

namespace detail {
struct Law {
    virtual ~Law() = default;
    virtual double pdf(double x) const = 0;
    virtual double log_pdf(double x) const = 0;
    // log density at support().lo + t, accurate for small t near a singular edge
    virtual double log_pdf_above_lo(double t) const { return log_pdf(support().lo + t); }
    virtual double mean() const = 0;
    virtual double variance() const = 0;
    virtual Interval support() const = 0;
    virtual std::optional<double> entropy_analytic() const = 0;
    virtual double draw(void* rng) const = 0;  // rng is a std::mt19937_64
    virtual std::string name() const = 0;
    virtual std::string spec() const = 0;
    // kinks and scale landmarks used as initial quadrature partition points
    virtual std::vector<double> landmarks() const = 0;
};
}  // namespace detail

class InputDistribution {
public:
    explicit InputDistribution(std::shared_ptr<const detail::Law> law);

    double pdf(double x) const { return law_->pdf(x); }
    double log_pdf(double x) const { return law_->log_pdf(x); }
    double log_pdf_above_lo(double t) const { return law_->log_pdf_above_lo(t); }
    double mean() const { return mean_; }
    double variance() const { return var_; }
    double stddev() const;
    Interval support() const { return support_; }
    std::optional<double> entropy_analytic() const { return law_->entropy_analytic(); }
    const std::string& name() const { return name_; }
    // Canonical spec string (parseable by parse_distribution).
    std::string spec() const { return law_->spec(); }
    const std::vector<double>& landmarks() const { return landmarks_; }

    // n independent draws; the stream is a pure function of seed.
    std::vector<double> sample(std::uint64_t seed, std::size_t n) const;

    // Quadrature options with this law's landmarks, tail scale and edge maps.
    IntegrationOptions integration_hints() const;

    const detail::Law& law() const { return *law_; }
    std::shared_ptr<const detail::Law> law_ptr() const { return law_; }

private:
    std::shared_ptr<const detail::Law> law_;
    double mean_;
    double var_;
    Interval support_;
    std::string name_;
    std::vector<double> landmarks_;
};

InputDistribution make_gaussian(double mu, double var);
InputDistribution make_uniform_zero_mean(double var);
InputDistribution make_exponential_shifted(double var);
InputDistribution make_laplace(double var);
InputDistribution make_triangular(double var);
InputDistribution make_gaussian_mixture_pm1(double var);
InputDistribution make_beta_prime(double alpha, double gamma);
// Law of c*X + m.
InputDistribution make_affine(const InputDistribution& base, double scale, double shift);

// Names of the variance-parameterized catalog members (all except beta-prime).
const std::vector<std::string>& catalog_names();
// Catalog member by name at the requested variance.
InputDistribution make_catalog(const std::string& name, double var);

// h(X): analytic when available, quadrature otherwise.
EstimateWithError entropy(const InputDistribution& d);

// int f(x) p(x) dx over the support, using the law's quadrature hints.
EstimateWithError expect(const InputDistribution& d, const std::function<double(double)>& f, double tol = 1e-11);

struct FisherInformation {
    EstimateWithError j;
    bool edge_truncated = false;  // computed on [a+eps, b-eps] for a finite edge
};

// J(X) = int p (d/dx log p)^2, score by central differences of log_pdf.
FisherInformation fisher_information(const InputDistribution& d);

}  // namespace condent
