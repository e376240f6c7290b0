#include "condent/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "condent/entropy.hpp"
#include "condent/errors.hpp"
#include "condent/format.hpp"
#include "condent/special.hpp"

namespace condent {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kLogSqrt2Pi = 0.5 * std::log(2.0 * M_PI);

std::mt19937_64& rng_of(void* p) { return *static_cast<std::mt19937_64*>(p); }

std::string fmt(double x) { return shortest(x); }

void require_var(double var, const char* who) {
    if (!(var > 0.0) || !std::isfinite(var))
        throw ParameterError(std::string(who) + ": variance must be positive and finite, got " + fmt(var));
}

class GaussianLaw final : public detail::Law {
public:
    GaussianLaw(double mu, double var) : mu_(mu), var_(var), sd_(std::sqrt(var)) {}
    double pdf(double x) const override { return std::exp(log_pdf(x)); }
    double log_pdf(double x) const override {
        const double z = (x - mu_) / sd_;
        return -0.5 * z * z - kLogSqrt2Pi - std::log(sd_);
    }
    double mean() const override { return mu_; }
    double variance() const override { return var_; }
    Interval support() const override { return {-kInf, kInf}; }
    std::optional<double> entropy_analytic() const override { return 0.5 * std::log(2.0 * M_PI * M_E * var_); }
    double draw(void* rng) const override { return std::normal_distribution<double>(mu_, sd_)(rng_of(rng)); }
    std::string name() const override { return "gaussian"; }
    std::string spec() const override { return "gaussian:mu=" + fmt(mu_) + ",var=" + fmt(var_); }
    std::vector<double> landmarks() const override {
        std::vector<double> v{mu_};
        for (double k : {1.0, 2.0, 4.0, 7.0}) {
            v.push_back(mu_ - k * sd_);
            v.push_back(mu_ + k * sd_);
        }
        return v;
    }

private:
    double mu_, var_, sd_;
};

class UniformLaw final : public detail::Law {
public:
    explicit UniformLaw(double var) : var_(var), a_(std::sqrt(3.0 * var)) {}
    double pdf(double x) const override { return (x >= -a_ && x <= a_) ? 0.5 / a_ : 0.0; }
    double log_pdf(double x) const override { return (x >= -a_ && x <= a_) ? -std::log(2.0 * a_) : -kInf; }
    double mean() const override { return 0.0; }
    double variance() const override { return var_; }
    Interval support() const override { return {-a_, a_}; }
    std::optional<double> entropy_analytic() const override { return std::log(2.0 * a_); }
    double draw(void* rng) const override { return std::uniform_real_distribution<double>(-a_, a_)(rng_of(rng)); }
    std::string name() const override { return "uniform"; }
    std::string spec() const override { return "uniform:var=" + fmt(var_); }
    std::vector<double> landmarks() const override { return {-a_, 0.0, a_}; }

private:
    double var_, a_;
};

// Exp(1/sigma) shifted left by sigma: support [-sigma, inf), zero mean.
class ExponentialLaw final : public detail::Law {
public:
    explicit ExponentialLaw(double var) : var_(var), s_(std::sqrt(var)) {}
    double pdf(double x) const override { return x >= -s_ ? std::exp(log_pdf(x)) : 0.0; }
    double log_pdf(double x) const override { return x >= -s_ ? -(x + s_) / s_ - std::log(s_) : -kInf; }
    double mean() const override { return 0.0; }
    double variance() const override { return var_; }
    Interval support() const override { return {-s_, kInf}; }
    std::optional<double> entropy_analytic() const override { return 1.0 + std::log(s_); }
    double draw(void* rng) const override {
        return std::exponential_distribution<double>(1.0 / s_)(rng_of(rng)) - s_;
    }
    std::string name() const override { return "exponential"; }
    std::string spec() const override { return "exponential:var=" + fmt(var_); }
    std::vector<double> landmarks() const override {
        std::vector<double> v{-s_};
        for (double k : {1.0, 2.0, 4.0, 8.0, 16.0}) v.push_back(-s_ + k * s_);
        return v;
    }

private:
    double var_, s_;
};

class LaplaceLaw final : public detail::Law {
public:
    explicit LaplaceLaw(double var) : var_(var), b_(std::sqrt(0.5 * var)) {}
    double pdf(double x) const override { return std::exp(log_pdf(x)); }
    double log_pdf(double x) const override { return -std::abs(x) / b_ - std::log(2.0 * b_); }
    double mean() const override { return 0.0; }
    double variance() const override { return var_; }
    Interval support() const override { return {-kInf, kInf}; }
    std::optional<double> entropy_analytic() const override { return 1.0 + std::log(2.0 * b_); }
    double draw(void* rng) const override {
        auto& g = rng_of(rng);
        const double e = std::exponential_distribution<double>(1.0 / b_)(g);
        return std::bernoulli_distribution(0.5)(g) ? e : -e;
    }
    std::string name() const override { return "laplace"; }
    std::string spec() const override { return "laplace:var=" + fmt(var_); }
    std::vector<double> landmarks() const override {
        std::vector<double> v{0.0};
        for (double k : {1.0, 3.0, 8.0}) {
            v.push_back(-k * b_);
            v.push_back(k * b_);
        }
        return v;
    }

private:
    double var_, b_;
};

// Symmetric triangle on [-c, c]; variance c^2/6.
class TriangularLaw final : public detail::Law {
public:
    explicit TriangularLaw(double var) : var_(var), c_(std::sqrt(6.0 * var)) {}
    double pdf(double x) const override {
        const double t = c_ - std::abs(x);
        return t > 0.0 ? t / (c_ * c_) : 0.0;
    }
    double log_pdf(double x) const override {
        const double t = c_ - std::abs(x);
        return t > 0.0 ? std::log(t) - 2.0 * std::log(c_) : -kInf;
    }
    double mean() const override { return 0.0; }
    double variance() const override { return var_; }
    Interval support() const override { return {-c_, c_}; }
    std::optional<double> entropy_analytic() const override { return 0.5 + std::log(c_); }
    double draw(void* rng) const override {
        auto& g = rng_of(rng);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        const double u1 = u(g);
        const double u2 = u(g);
        return c_ * (u1 + u2 - 1.0);
    }
    std::string name() const override { return "triangular"; }
    std::string spec() const override { return "triangular:var=" + fmt(var_); }
    std::vector<double> landmarks() const override { return {-c_, -0.5 * c_, 0.0, 0.5 * c_, c_}; }

private:
    double var_, c_;
};

// Equal mixture of N(-1, var-1) and N(+1, var-1).
class Gm2Law final : public detail::Law {
public:
    explicit Gm2Law(double var) : var_(var), s_(std::sqrt(var - 1.0)) {}
    double pdf(double x) const override { return std::exp(log_pdf(x)); }
    double log_pdf(double x) const override {
        const double a = (x + 1.0) / s_;
        const double b = (x - 1.0) / s_;
        const double la = -0.5 * a * a;
        const double lb = -0.5 * b * b;
        const double m = std::max(la, lb);
        return m + std::log(0.5 * (std::exp(la - m) + std::exp(lb - m))) - kLogSqrt2Pi - std::log(s_);
    }
    double mean() const override { return 0.0; }
    double variance() const override { return var_; }
    Interval support() const override { return {-kInf, kInf}; }
    std::optional<double> entropy_analytic() const override { return std::nullopt; }
    double draw(void* rng) const override {
        auto& g = rng_of(rng);
        const double c = std::bernoulli_distribution(0.5)(g) ? 1.0 : -1.0;
        return c + s_ * std::normal_distribution<double>(0.0, 1.0)(g);
    }
    std::string name() const override { return "gm2"; }
    std::string spec() const override { return "gm2:var=" + fmt(var_); }
    std::vector<double> landmarks() const override {
        std::vector<double> v{0.0};
        for (double c : {-1.0, 1.0}) {
            v.push_back(c);
            for (double k : {1.0, 2.0, 4.0, 8.0}) {
                v.push_back(c - k * s_);
                v.push_back(c + k * s_);
            }
        }
        return v;
    }

private:
    double var_, s_;
};

// X = 1/B with B ~ Beta(gamma, alpha - gamma); support [1, inf).
class BetaPrimeLaw final : public detail::Law {
public:
    BetaPrimeLaw(double alpha, double gamma) : a_(alpha), g_(gamma), d_(alpha - gamma) {
        lognorm_ = log_gamma(a_) - log_gamma(d_) - log_gamma(g_);
        scale_ = d_ / (g_ - 1.0);
        // X = 1/B with B ~ Beta(gamma, d)
        mean_ = (a_ - 1.0) / (g_ - 1.0);
        var_ = mean_ * (a_ - 2.0) / (g_ - 2.0) - mean_ * mean_;
    }
    double pdf(double x) const override { return x > 1.0 ? std::exp(log_pdf(x)) : 0.0; }
    double log_pdf(double x) const override {
        if (!(x > 1.0)) return (x == 1.0 && d_ == 1.0) ? lognorm_ : -kInf;
        return lognorm_ + (d_ - 1.0) * std::log(x - 1.0) - a_ * std::log(x);
    }
    double log_pdf_above_lo(double t) const override {
        if (!(t > 0.0)) return log_pdf(1.0 + t);
        return lognorm_ + (d_ - 1.0) * std::log(t) - a_ * std::log1p(t);
    }
    double mean() const override { return mean_; }
    double variance() const override { return var_; }
    Interval support() const override { return {1.0, kInf}; }
    std::optional<double> entropy_analytic() const override {
        // h(1/B) = h(B) - 2 E[log B]
        const double hb = log_gamma(g_) + log_gamma(d_) - log_gamma(a_) - (g_ - 1.0) * digamma(g_) -
                          (d_ - 1.0) * digamma(d_) + (a_ - 2.0) * digamma(a_);
        return hb - 2.0 * (digamma(g_) - digamma(a_));
    }
    double draw(void* rng) const override {
        auto& g = rng_of(rng);
        const double x1 = std::gamma_distribution<double>(g_, 1.0)(g);
        const double x2 = std::gamma_distribution<double>(d_, 1.0)(g);
        return 1.0 + x2 / x1;
    }
    std::string name() const override { return "betaprime"; }
    std::string spec() const override { return "betaprime:alpha=" + fmt(a_) + ",gamma=" + fmt(g_); }
    std::vector<double> landmarks() const override {
        std::vector<double> v{1.0};
        for (double k : {0.05, 0.25, 1.0, 3.0, 10.0, 40.0}) v.push_back(1.0 + k * scale_);
        return v;
    }
    double alpha() const { return a_; }
    double gamma() const { return g_; }

private:
    double a_, g_, d_;
    double lognorm_ = 0.0;
    double scale_ = 1.0;
    double mean_ = 0.0;
    double var_ = 0.0;
};

class AffineLaw final : public detail::Law {
public:
    AffineLaw(std::shared_ptr<const detail::Law> base, double c, double m) : base_(std::move(base)), c_(c), m_(m) {}
    double pdf(double x) const override { return base_->pdf((x - m_) / c_) / std::abs(c_); }
    double log_pdf(double x) const override { return base_->log_pdf((x - m_) / c_) - std::log(std::abs(c_)); }
    double log_pdf_above_lo(double t) const override {
        if (c_ < 0.0) return log_pdf(support().lo + t);
        return base_->log_pdf_above_lo(t / c_) - std::log(c_);
    }
    double mean() const override { return c_ * base_->mean() + m_; }
    double variance() const override { return c_ * c_ * base_->variance(); }
    Interval support() const override {
        const Interval s = base_->support();
        const double a = c_ * s.lo + m_;
        const double b = c_ * s.hi + m_;
        return {std::min(a, b), std::max(a, b)};
    }
    std::optional<double> entropy_analytic() const override {
        const auto h = base_->entropy_analytic();
        if (!h) return std::nullopt;
        return *h + std::log(std::abs(c_));
    }
    double draw(void* rng) const override { return c_ * base_->draw(rng) + m_; }
    std::string name() const override { return base_->name(); }
    std::string spec() const override {
        return "affine(scale=" + fmt(c_) + ",shift=" + fmt(m_) + "," + base_->spec() + ")";
    }
    std::vector<double> landmarks() const override {
        auto v = base_->landmarks();
        for (auto& x : v) x = c_ * x + m_;
        return v;
    }
    int tail_power() const { return dynamic_cast<const BetaPrimeLaw*>(base_.get()) ? 2 : 1; }

private:
    std::shared_ptr<const detail::Law> base_;
    double c_, m_;
};

int tail_power_of(const detail::Law& law) {
    if (dynamic_cast<const BetaPrimeLaw*>(&law)) return 2;
    if (auto* a = dynamic_cast<const AffineLaw*>(&law)) return a->tail_power();
    return 1;
}

}  // namespace

InputDistribution::InputDistribution(std::shared_ptr<const detail::Law> law) : law_(std::move(law)) {
    if (!law_) throw ParameterError("null law");
    mean_ = law_->mean();
    var_ = law_->variance();
    support_ = law_->support();
    name_ = law_->name();
    landmarks_ = law_->landmarks();
    std::sort(landmarks_.begin(), landmarks_.end());
    landmarks_.erase(std::unique(landmarks_.begin(), landmarks_.end()), landmarks_.end());
    std::erase_if(landmarks_, [this](double x) { return !(x >= support_.lo && x <= support_.hi); });
}

double InputDistribution::stddev() const { return std::sqrt(var_); }

std::vector<double> InputDistribution::sample(std::uint64_t seed, std::size_t n) const {
    std::mt19937_64 g(seed);
    std::vector<double> out(n);
    for (auto& x : out) x = law_->draw(&g);
    return out;
}

IntegrationOptions InputDistribution::integration_hints() const {
    IntegrationOptions opt;
    opt.breakpoints = landmarks_;
    opt.tail_scale = stddev();
    opt.sqrt_lo = std::isfinite(support_.lo);
    opt.sqrt_hi = std::isfinite(support_.hi);
    opt.tail_power = tail_power_of(*law_);
    return opt;
}

InputDistribution make_gaussian(double mu, double var) {
    require_var(var, "gaussian");
    if (!std::isfinite(mu)) throw ParameterError("gaussian: mean must be finite");
    return InputDistribution(std::make_shared<GaussianLaw>(mu, var));
}

InputDistribution make_uniform_zero_mean(double var) {
    require_var(var, "uniform");
    return InputDistribution(std::make_shared<UniformLaw>(var));
}

InputDistribution make_exponential_shifted(double var) {
    require_var(var, "exponential");
    return InputDistribution(std::make_shared<ExponentialLaw>(var));
}

InputDistribution make_laplace(double var) {
    require_var(var, "laplace");
    return InputDistribution(std::make_shared<LaplaceLaw>(var));
}

InputDistribution make_triangular(double var) {
    require_var(var, "triangular");
    return InputDistribution(std::make_shared<TriangularLaw>(var));
}

InputDistribution make_gaussian_mixture_pm1(double var) {
    if (!(var > 1.0) || !std::isfinite(var))
        throw ParameterError("gm2: variance must exceed 1 (component variance var-1 > 0), got " + fmt(var));
    return InputDistribution(std::make_shared<Gm2Law>(var));
}

InputDistribution make_beta_prime(double alpha, double gamma) {
    if (!(gamma > 2.0) || !(alpha > gamma) || !std::isfinite(alpha))
        throw ParameterError("betaprime: need alpha > gamma > 2, got alpha=" + fmt(alpha) + ", gamma=" + fmt(gamma));
    return InputDistribution(std::make_shared<BetaPrimeLaw>(alpha, gamma));
}

InputDistribution make_affine(const InputDistribution& base, double scale, double shift) {
    if (!(scale != 0.0) || !std::isfinite(scale) || !std::isfinite(shift))
        throw ParameterError("affine map needs a finite nonzero scale and finite shift");
    return InputDistribution(std::make_shared<AffineLaw>(base.law_ptr(), scale, shift));
}

const std::vector<std::string>& catalog_names() {
    static const std::vector<std::string> names{"gaussian", "uniform", "exponential", "laplace", "triangular", "gm2"};
    return names;
}

InputDistribution make_catalog(const std::string& name, double var) {
    if (name == "gaussian") return make_gaussian(0.0, var);
    if (name == "uniform") return make_uniform_zero_mean(var);
    if (name == "exponential") return make_exponential_shifted(var);
    if (name == "laplace") return make_laplace(var);
    if (name == "triangular") return make_triangular(var);
    if (name == "gm2") return make_gaussian_mixture_pm1(var);
    throw ParameterError("unknown catalog distribution '" + name + "'");
}

EstimateWithError entropy(const InputDistribution& d) {
    if (const auto h = d.entropy_analytic()) return {*h, 0.0, Method::analytic};
    return entropy_from_pdf([&d](double x) { return d.pdf(x); }, d.support(), 1e-11, d.integration_hints());
}

EstimateWithError expect(const InputDistribution& d, const std::function<double(double)>& f, double tol) {
    IntegrationOptions opt = d.integration_hints();
    opt.abs_tol = tol;
    opt.rel_tol = tol;
    return integrate([&](double x) {
        const double p = d.pdf(x);
        return p > 0.0 ? f(x) * p : 0.0;
    }, d.support(), opt);
}

FisherInformation fisher_information(const InputDistribution& d) {
    const Interval s = d.support();
    const double sd = d.stddev();
    const bool lo_fin = std::isfinite(s.lo);
    const bool hi_fin = std::isfinite(s.hi);
    const double width = (lo_fin && hi_fin) ? s.hi - s.lo : sd;
    const double eps = 1e-6 * width;

    // A density that does not vanish at a finite edge has an unbounded score there.
    double peak = 0.0;
    for (double x : d.landmarks()) peak = std::max(peak, d.pdf(x));
    peak = std::max(peak, d.pdf(d.mean()));
    auto jump_at = [&](double x) { return d.pdf(x) > 1e-3 * peak; };
    if ((lo_fin && jump_at(s.lo + eps)) || (hi_fin && jump_at(s.hi - eps)))
        throw ConvergenceError("score blows up at a support edge where the density jumps; J(X) is not finite",
                               {kInf, kInf, Method::quadrature});

    const Interval iv{lo_fin ? s.lo + eps : s.lo, hi_fin ? s.hi - eps : s.hi};
    const auto& marks = d.landmarks();
    auto score = [&](double x) {
        double h = 1e-4 * sd;
        // keep the stencil on one side of any landmark and inside the interval
        for (double m : marks)
            if (m != x) h = std::min(h, 0.02 * std::abs(x - m));
        if (lo_fin) h = std::min(h, 0.02 * (x - s.lo));
        if (hi_fin) h = std::min(h, 0.02 * (s.hi - x));
        if (!(h > 0.0)) return 0.0;
        return richardson_first([&](double t) { return d.log_pdf(t); }, x, h);
    };
    IntegrationOptions opt = d.integration_hints();
    opt.breakpoints.erase(std::remove_if(opt.breakpoints.begin(), opt.breakpoints.end(),
                                         [&](double b) { return !(b > iv.lo && b < iv.hi); }),
                          opt.breakpoints.end());
    opt.sqrt_lo = opt.sqrt_hi = false;
    opt.abs_tol = 1e-10;
    opt.rel_tol = 1e-9;
    opt.max_intervals = 8000;
    const auto r = integrate_nothrow([&](double x) {
        const double p = d.pdf(x);
        if (!(p > 0.0)) return 0.0;
        const double sc = score(x);
        return p * sc * sc;
    }, iv, opt);
    EstimateWithError est{r.value[0], r.error[0], Method::quadrature};
    if (!r.converged) throw ConvergenceError("Fisher information quadrature did not converge", est);
    return {est, lo_fin || hi_fin};
}

}  // namespace condent
