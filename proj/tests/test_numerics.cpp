#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "condent/entropy.hpp"
#include "condent/errors.hpp"
#include "condent/quadrature.hpp"
#include "condent/special.hpp"

using namespace condent;

namespace {
const double kSqrtPi = std::sqrt(M_PI);

// int x^j exp(-x^2) dx over R: Gamma((j+1)/2) for even j, 0 for odd j
double hermite_moment(int j) { return j % 2 ? 0.0 : std::tgamma(0.5 * (j + 1)); }
}  // namespace

TEST(GaussHermite, TwoPointRule) {
    const auto r = gauss_hermite(2);
    ASSERT_EQ(r.nodes.size(), 2u);
    EXPECT_NEAR(r.nodes[0], -1.0 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(r.nodes[1], 1.0 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(r.weights[0], kSqrtPi / 2, 1e-15);
    EXPECT_NEAR(r.weights[1], kSqrtPi / 2, 1e-15);
    EXPECT_EQ(r.kind, RuleKind::gauss_hermite);
}

TEST(GaussHermite, OnePointRule) {
    const auto r = gauss_hermite(1);
    EXPECT_EQ(r.nodes[0], 0.0);
    EXPECT_NEAR(r.weights[0], kSqrtPi, 1e-15);
}

TEST(GaussHermite, OrderOutOfRange) {
    EXPECT_THROW(gauss_hermite(0), ParameterError);
    EXPECT_THROW(gauss_hermite(513), ParameterError);
}

TEST(GaussHermite, SecondMomentOrder64) {
    const auto r = gauss_hermite(64);
    double acc = 0.0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) acc += r.weights[i] * r.nodes[i] * r.nodes[i];
    EXPECT_NEAR(acc, kSqrtPi / 2, 1e-12);
}

TEST(GaussHermite, WeightSumAndPositivity) {
    for (int n : {2, 3, 7, 20, 64, 96, 128, 256, 384, 512}) {
        const auto r = gauss_hermite(n);
        double s = 0.0;
        for (double w : r.weights) s += w;
        EXPECT_NEAR(s, kSqrtPi, 1e-12) << "order " << n;
        for (double lw : r.log_weights) EXPECT_TRUE(std::isfinite(lw)) << "order " << n;
        // beyond ~360 nodes the outermost weights underflow double precision
        if (n <= 256) {
            for (double w : r.weights) EXPECT_GT(w, 0.0) << "order " << n;
        }
    }
}

TEST(GaussHermite, ExactForMonomials) {
    for (int n : {2, 5, 16, 64, 96, 200}) {
        const auto r = gauss_hermite(n);
        const int jmax = std::min(2 * n - 1, 150);
        for (int j = 0; j <= jmax; ++j) {
            double acc = 0.0;
            for (std::size_t i = 0; i < r.nodes.size(); ++i) acc += r.weights[i] * std::pow(r.nodes[i], j);
            const double ref = hermite_moment(j);
            const double scale = std::max(1.0, std::tgamma(0.5 * (j + 2)));
            EXPECT_NEAR(acc, ref, 1e-10 * scale) << "order " << n << " power " << j;
        }
    }
}

TEST(GaussHermite, StandardNormalReweighting) {
    EXPECT_NEAR(gaussian_expectation([](double) { return 1.0; }, 0.0, 1.0), 1.0, 1e-10);
    EXPECT_NEAR(gaussian_expectation([](double x) { return x * x; }, 2.0, 3.0), 7.0, 1e-10);
}

TEST(Integrate, StandardNormalPdf) {
    auto phi = [](double x) { return std::exp(-0.5 * x * x) / std::sqrt(2 * M_PI); };
    const auto r = integrate(phi, {-INFINITY, INFINITY}, 1e-10);
    EXPECT_NEAR(r.value, 1.0, 1e-10);
    EXPECT_LE(std::abs(r.value - 1.0), r.abs_error + 1e-15);
}

TEST(Integrate, GammaTwoNumerator) {
    const auto r = integrate([](double x) { return x * std::exp(-x); }, {0.0, INFINITY}, 1e-10);
    EXPECT_NEAR(r.value, 1.0, 1e-10);
    EXPECT_LE(std::abs(r.value - 1.0), r.abs_error + 1e-15);
}

TEST(Integrate, UniformPlogP) {
    const auto r = integrate([](double) { return 0.5 * std::log(0.5); }, {0.0, 2.0}, 1e-10);
    EXPECT_NEAR(r.value, -std::log(2.0), 1e-12);
}

TEST(Integrate, ErrorBoundsTrueErrorOnAnalyticSet) {
    struct Case {
        std::function<double(double)> f;
        Interval iv;
        double exact;
    };
    const std::vector<Case> cases = {
        {[](double x) { return std::exp(-x * x); }, {-INFINITY, INFINITY}, std::sqrt(M_PI)},
        {[](double x) { return 1.0 / (1.0 + x * x); }, {-INFINITY, INFINITY}, M_PI},
        {[](double x) { return std::sin(x); }, {0.0, M_PI}, 2.0},
        {[](double x) { return std::exp(-x); }, {0.0, INFINITY}, 1.0},
        {[](double x) { return std::exp(x); }, {-INFINITY, 0.0}, 1.0},
        {[](double x) { return std::abs(x - 0.3); }, {-1.0, 1.0}, 0.5 * (1.3 * 1.3 + 0.7 * 0.7)},
    };
    for (const auto& c : cases) {
        const auto r = integrate(c.f, c.iv, 1e-9);
        EXPECT_LE(std::abs(r.value - c.exact), std::max(r.abs_error, 1e-14)) << c.exact;
    }
}

TEST(Integrate, EdgeSingularityWithQuadraticMap) {
    // int_0^1 x^(-1/2) dx = 2
    IntegrationOptions opt;
    opt.abs_tol = 1e-11;
    opt.sqrt_lo = true;
    const auto r = integrate([](double x) { return 1.0 / std::sqrt(x); }, {0.0, 1.0}, opt);
    EXPECT_NEAR(r.value, 2.0, 1e-10);
}

TEST(Integrate, NonConvergenceCarriesEstimate) {
    IntegrationOptions opt;
    opt.abs_tol = 1e-14;
    opt.max_intervals = 3;
    try {
        integrate([](double x) { return std::sin(50 * x); }, {0.0, 10.0}, opt);
        FAIL() << "expected ConvergenceError";
    } catch (const ConvergenceError& e) {
        EXPECT_GT(e.best().abs_error, 0.0);
    }
}

TEST(Integrate, VectorValuedMoments) {
    auto g = [](double x) {
        const double p = std::exp(-0.5 * x * x) / std::sqrt(2 * M_PI);
        return std::array<double, 3>{p, x * p, x * x * p};
    };
    IntegrationOptions opt;
    opt.abs_tol = 1e-12;
    const auto r = integrate_adaptive<3>(g, {-INFINITY, INFINITY}, opt, {1.0, 1.0, 1.0});
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.value[0], 1.0, 1e-12);
    EXPECT_NEAR(r.value[1], 0.0, 1e-12);
    EXPECT_NEAR(r.value[2], 1.0, 1e-12);
}

TEST(Integrate, AdaptiveRuleReproducesIntegral) {
    auto f = [](double x) { return std::exp(-x) * x * x; };
    IntegrationOptions opt;
    opt.abs_tol = 1e-12;
    const auto rule = adaptive_rule(f, {0.0, INFINITY}, opt);
    EXPECT_EQ(rule.kind, RuleKind::adaptive_interval);
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) acc += rule.weights[i] * f(rule.nodes[i]);
    EXPECT_NEAR(acc, 2.0, 1e-10);
}

TEST(EntropyFromPdf, AnalyticSet) {
    auto gauss = [](double x) { return std::exp(-0.5 * x * x) / std::sqrt(2 * M_PI); };
    EXPECT_NEAR(entropy_from_pdf(gauss, {-INFINITY, INFINITY}, 1e-10).value, 0.5 * kLog2PiE, 1e-6);
    const double a = std::sqrt(3.0);
    auto unif = [a](double) { return 1.0 / (2 * a); };
    EXPECT_NEAR(entropy_from_pdf(unif, {-a, a}, 1e-10).value, std::log(2 * a), 1e-6);
    auto expo = [](double x) { return std::exp(-x); };
    EXPECT_NEAR(entropy_from_pdf(expo, {0.0, INFINITY}, 1e-10).value, 1.0, 1e-6);
    const double b = 1.0 / std::sqrt(2.0);
    auto lap = [b](double x) { return std::exp(-std::abs(x) / b) / (2 * b); };
    IntegrationOptions hint;
    hint.breakpoints = {0.0};
    EXPECT_NEAR(entropy_from_pdf(lap, {-INFINITY, INFINITY}, 1e-10, hint).value, 1.0 + std::log(2 * b), 1e-6);
}

TEST(EntropyFromPdf, RejectsUnnormalizedPdf) {
    EXPECT_THROW(entropy_from_pdf([](double) { return 1.0; }, {0.0, 2.0}, 1e-8), InputError);
}

TEST(CentralDiff, Examples) {
    EXPECT_NEAR(central_diff([](double x) { return x * x; }, 3.0, 1e-4), 6.0, 1e-7);
    EXPECT_EQ(central_diff([](double) { return 4.2; }, 1.0, 1e-3), 0.0);
    EXPECT_NEAR(central_diff([](double x) { return std::exp(x); }, 0.0, 1e-5), 1.0, 1e-9);
    EXPECT_THROW(central_diff([](double x) { return std::log(x); }, 0.0, 1e-3), EvaluationError);
}

TEST(SpecialFunctions, Examples) {
    EXPECT_NEAR(log_gamma(1.0), 0.0, 1e-15);
    EXPECT_NEAR(digamma(1.0), -0.5772156649015329, 1e-12);
    EXPECT_NEAR(log_gamma(0.5), 0.5 * std::log(M_PI), 1e-14);
    EXPECT_NEAR(digamma(2.0), 1.0 - 0.5772156649015329, 1e-12);
    EXPECT_THROW(log_gamma(0.0), ParameterError);
    EXPECT_THROW(digamma(-1.0), ParameterError);
}

namespace {
std::vector<double> normal_samples(std::size_t n, int dim, double scale, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z;
    std::vector<double> v(n * dim);
    for (auto& x : v) x = scale * z(rng);
    return v;
}
}  // namespace

TEST(KnnEntropy, GaussianOneMillion) {
    const auto s = normal_samples(1000000, 1, 1.0, 1);
    const auto e = knn_entropy(s, 1, 4);
    EXPECT_NEAR(e.value, 0.5 * kLog2PiE, 0.01);
    EXPECT_GT(e.abs_error, 0.0);
    EXPECT_EQ(e.method, Method::monte_carlo);
}

TEST(KnnEntropy, UniformUnitInterval) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> s(1000000);
    for (auto& x : s) x = u(rng);
    EXPECT_NEAR(knn_entropy(s, 1, 4).value, 0.0, 0.01);
}

TEST(KnnEntropy, ScaledGaussian) {
    const auto s = normal_samples(1000000, 1, 0.5, 3);
    EXPECT_NEAR(knn_entropy(s, 1, 4).value, 0.5 * kLog2PiE - std::log(2.0), 0.01);
}

TEST(KnnEntropy, GaussianDimensionsTwoAndThree) {
    for (int d : {2, 3}) {
        const auto s = normal_samples(1000000, d, 1.0, 10 + d);
        EXPECT_NEAR(knn_entropy(s, d, 4).value, 0.5 * d * kLog2PiE, 0.02) << "dim " << d;
    }
}

TEST(KnnEntropy, DeterministicForSeed) {
    const auto s = normal_samples(20000, 2, 1.0, 5);
    const auto a = knn_entropy(s, 2, 4, 99);
    const auto b = knn_entropy(s, 2, 4, 99);
    EXPECT_EQ(a.value, b.value);
    EXPECT_EQ(a.abs_error, b.abs_error);
}

TEST(KnnEntropy, RejectsTiesAndSmallSets) {
    std::vector<double> s(5000);
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = static_cast<double>(i % 4000);
    EXPECT_THROW(knn_entropy(s, 1, 4), DegenerateSampleError);
    EXPECT_THROW(knn_entropy(std::vector<double>(500, 1.0), 1, 4), ParameterError);
}
