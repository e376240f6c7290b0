#include "condent/vector_awgn.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>

#include "condent/awgn_scalar.hpp"
#include "condent/entropy.hpp"
#include "condent/errors.hpp"
#include "condent/format.hpp"
#include "condent/parallel.hpp"
#include "condent/peaked.hpp"

namespace condent {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLog2Pi = 1.8378770664093454836;
constexpr std::size_t kChunk = 1 << 16;

std::string num(double x) { return shortest(x); }

std::string vec_str(const Vec& v) {
    std::string s = "[";
    for (int i = 0; i < v.size(); ++i) s += (i ? "," : "") + num(v[i]);
    return s + "]";
}

std::string mat_str(const Mat& m) {
    std::string s = "[";
    for (int i = 0; i < m.rows(); ++i) {
        s += i ? ",[" : "[";
        for (int j = 0; j < m.cols(); ++j) s += (j ? "," : "") + num(m(i, j));
        s += "]";
    }
    return s + "]";
}

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double cond_number(const Mat& m) {
    Eigen::JacobiSVD<Mat> svd(m);
    const auto& s = svd.singularValues();
    return s(s.size() - 1) > 0.0 ? s(0) / s(s.size() - 1) : kInf;
}

void require_square(const Mat& m, int n, const char* what) {
    if (m.rows() != n || m.cols() != n)
        throw ParameterError(std::string(what) + " must be " + std::to_string(n) + "x" + std::to_string(n));
    if (!m.allFinite()) throw ParameterError(std::string(what) + " has non-finite entries");
}

// log int q(z) exp(-prec/2 (z - c)^2) dz and the tilted mean/variance
PeakedResult<0> tilted(const InputDistribution& q, double prec, double c, double rel_tol) {
    PeakedProblem p;
    const Interval dom = q.support();
    p.dom = dom;
    p.origin = std::isfinite(dom.lo) ? dom.lo : 0.0;
    const double o = p.origin;
    const bool from_lo = std::isfinite(dom.lo);
    p.log_w_t = [&q, prec, c, o, from_lo](double t) {
        const double z = o + t;
        const double lq = from_lo ? q.log_pdf_above_lo(t) : q.log_pdf(z);
        if (!(lq > -kInf)) return -kInf;
        return lq - 0.5 * prec * (z - c) * (z - c);
    };
    const double sd = q.stddev(), sp = 1.0 / std::sqrt(prec);
    // the tilt confines the mass between the prior bulk and c: no far ladder
    p.candidates = peak_candidates(dom, q.mean(), sd, q.landmarks(), 0, -1, 16);
    const double pm = (q.mean() / (sd * sd) + c * prec) / (1.0 / (sd * sd) + prec);
    const double ps = 1.0 / std::sqrt(1.0 / (sd * sd) + prec);
    for (double k = -8.0; k <= 8.0; k += 1.0) {
        p.candidates.push_back(c + k * sp);
        p.candidates.push_back(pm + k * ps);
    }
    p.landmarks = q.landmarks();
    p.ref_scale = std::min(sd, ps);
    p.walk_start = 1e-3 * p.ref_scale;
    p.mode_rel_tol = 1e-6 * p.ref_scale;
    const IntegrationOptions h = q.integration_hints();
    p.sqrt_lo = h.sqrt_lo;
    p.sqrt_hi = h.sqrt_hi;
    p.tail_power = h.tail_power;
    p.rel_tol = rel_tol;
    auto r = integrate_peaked<0>(p, [](double) { return std::array<double, 0>{}; });
    if (r.status == PeakStatus::not_converged)
        throw ConvergenceError("vector posterior: inner quadrature did not converge", {r.mean, r.mean_err, Method::quadrature});
    if (r.status == PeakStatus::diverges) throw RegularityError("vector posterior: weight diverges");
    if (r.status == PeakStatus::no_mass) r.log_mass = -kInf;
    return r;
}

struct ZPosterior {
    Vec mean;
    Mat cov;
    Vec mean_err;
    double log_mass = 0.0;  // log int prod q_i(z_i) exp(-1/2 (z - mu)^T P (z - mu)) dz
    double ess = 0.0;
    Method method = Method::quadrature;
};

// Gaussian approximation of the z posterior (prior moments matched)
void gaussian_guess(const VectorChannel& ch, const Vec& mu, Vec& mean, Mat& cov) {
    const int n = ch.dim();
    Vec prior_prec(n), prior_mean(n);
    for (int i = 0; i < n; ++i) {
        const auto& q = ch.input().factors()[i];
        prior_prec[i] = 1.0 / q.variance();
        prior_mean[i] = q.mean();
    }
    const Mat lam = Mat(prior_prec.asDiagonal()) + ch.P();
    Eigen::LLT<Mat> llt(lam);
    cov = llt.solve(Mat::Identity(n, n));
    mean = llt.solve(prior_prec.cwiseProduct(prior_mean) + ch.P() * mu);
}

ZPosterior z_posterior_1(const VectorChannel& ch, const Vec& mu, const VectorOptions& opt) {
    const auto r = tilted(ch.input().factors()[0], ch.P()(0, 0), mu[0], opt.rel_tol);
    if (!std::isfinite(r.log_mass)) throw TailError("vector posterior: no mass at this output");
    ZPosterior zp;
    zp.mean = Vec::Constant(1, r.mean);
    zp.cov = Mat::Constant(1, 1, r.var);
    zp.mean_err = Vec::Constant(1, r.mean_err);
    zp.log_mass = r.log_mass;
    return zp;
}

// Outer adaptive integral over z1 of the inner integral over z2 | z1.
ZPosterior z_posterior_2(const VectorChannel& ch, const Vec& mu, const VectorOptions& opt) {
    const auto& q1 = ch.input().factors()[0];
    const auto& q2 = ch.input().factors()[1];
    const Mat& P = ch.P();
    const double p22 = P(1, 1), k12 = P(0, 1) / P(1, 1);
    const double schur = P(0, 0) - P(0, 1) * k12;
    Vec gm;
    Mat gc;
    gaussian_guess(ch, mu, gm, gc);
    const double c2 = gm[1];

    PeakedProblem p;
    const Interval dom = q1.support();
    p.dom = dom;
    p.origin = std::isfinite(dom.lo) ? dom.lo : 0.0;
    const double o = p.origin;
    const bool from_lo = std::isfinite(dom.lo);

    struct Cache {
        double t = std::numeric_limits<double>::quiet_NaN();
        PeakedResult<0> r;
    } cache;
    auto inner = [&](double t) -> const PeakedResult<0>& {
        if (t != cache.t) {
            const double z1 = o + t;
            cache.r = tilted(q2, p22, mu[1] - k12 * (z1 - mu[0]), opt.rel_tol);
            cache.t = t;
        }
        return cache.r;
    };
    p.log_w_t = [&](double t) {
        const double z1 = o + t;
        const double lq = from_lo ? q1.log_pdf_above_lo(t) : q1.log_pdf(z1);
        if (!(lq > -kInf)) return -kInf;
        const double d = z1 - mu[0];
        const double outer = lq - 0.5 * schur * d * d;
        if (!(outer > -kInf)) return -kInf;
        return outer + inner(t).log_mass;
    };
    const double sd = q1.stddev();
    // every outer evaluation is an inner integral: coarse probes, a loose mode
    p.candidates = peak_candidates(dom, q1.mean(), sd, q1.landmarks(), 0, -1, 16);
    const double gs = std::sqrt(gc(0, 0)), ss = 1.0 / std::sqrt(schur);
    for (double k = -8.0; k <= 8.0; k += 2.0) {
        p.candidates.push_back(gm[0] + k * gs);
        p.candidates.push_back(mu[0] + k * ss);
    }
    p.landmarks = q1.landmarks();
    p.ref_scale = std::min(sd, gs);
    p.walk_start = 1e-3 * p.ref_scale;
    p.mode_rel_tol = 1e-4 * p.ref_scale;
    const IntegrationOptions h = q1.integration_hints();
    p.sqrt_lo = h.sqrt_lo;
    p.sqrt_hi = h.sqrt_hi;
    p.tail_power = h.tail_power;
    p.rel_tol = opt.rel_tol;

    // payload centred at the Gaussian guess to limit cancellation
    const auto r = integrate_peaked<3>(p, [&](double t) {
        const auto& in = inner(t);
        const double d1 = o + t - gm[0], d2 = in.mean - c2;
        return std::array<double, 3>{d2, d1 * d2, in.var + d2 * d2};
    });
    if (r.status == PeakStatus::not_converged)
        throw ConvergenceError("vector posterior: outer quadrature did not converge", {r.mean, r.mean_err, Method::quadrature});
    if (r.status != PeakStatus::ok) throw TailError("vector posterior: no mass at this output");

    ZPosterior zp;
    const double e1 = r.mean - gm[0], e2 = r.payload[0];
    zp.mean = Vec(2);
    zp.mean << r.mean, c2 + e2;
    zp.cov = Mat(2, 2);
    zp.cov(0, 0) = r.var;
    zp.cov(0, 1) = zp.cov(1, 0) = r.payload[1] - e1 * e2;
    zp.cov(1, 1) = std::max(r.payload[2] - e2 * e2, 0.0);
    zp.mean_err = Vec(2);
    zp.mean_err << r.mean_err, r.payload_err[0];
    zp.log_mass = r.log_mass;
    return zp;
}

// Self-normalized importance sampling in the z frame with an inflated Gaussian proposal.
ZPosterior z_posterior_is(const VectorChannel& ch, const Vec& mu, const VectorOptions& opt) {
    const int n = ch.dim();
    Vec gm;
    Mat gc;
    gaussian_guess(ch, mu, gm, gc);
    const Mat prop_cov = 2.25 * gc;
    const Eigen::LLT<Mat> llt(prop_cov);
    const Mat Lp = llt.matrixL();
    const double log_det_prop = 2.0 * Lp.diagonal().array().log().sum();

    const std::size_t np = opt.particles;
    std::uint64_t s = opt.seed;
    for (int i = 0; i < n; ++i) s = splitmix(s ^ std::bit_cast<std::uint64_t>(mu[i]));
    std::mt19937_64 g(s);
    std::normal_distribution<double> nd;
    std::vector<double> lw(np);
    std::vector<Vec> zs(np);
    double lmax = -kInf;
    for (std::size_t k = 0; k < np; ++k) {
        Vec e(n);
        for (int i = 0; i < n; ++i) e[i] = nd(g);
        const Vec z = gm + Lp * e;
        double l = 0.0;
        for (int i = 0; i < n && l > -kInf; ++i) l += ch.input().factors()[i].log_pdf(z[i]);
        const Vec d = z - mu;
        l += -0.5 * d.dot(ch.P() * d) + 0.5 * e.squaredNorm() + 0.5 * log_det_prop + 0.5 * n * kLog2Pi;
        lw[k] = l;
        zs[k] = z;
        lmax = std::max(lmax, l);
    }
    if (!std::isfinite(lmax)) throw ResolutionError("importance sampling: every particle has zero weight");
    double sw = 0.0, sw2 = 0.0;
    Vec m = Vec::Zero(n);
    for (std::size_t k = 0; k < np; ++k) {
        const double w = std::exp(lw[k] - lmax);
        sw += w;
        sw2 += w * w;
        m += w * zs[k];
    }
    m /= sw;
    Mat c = Mat::Zero(n, n);
    for (std::size_t k = 0; k < np; ++k) {
        const double w = std::exp(lw[k] - lmax);
        const Vec d = zs[k] - m;
        c += w * d * d.transpose();
    }
    c /= sw;
    const double ess = sw * sw / sw2;
    if (ess < opt.min_ess)
        throw ResolutionError("importance sampling: effective sample size " + num(ess) + " below " + num(opt.min_ess));
    ZPosterior zp;
    zp.mean = m;
    zp.cov = c;
    zp.mean_err = (c.diagonal() / ess).cwiseSqrt();
    zp.log_mass = lmax + std::log(sw / static_cast<double>(np));
    zp.ess = ess;
    zp.method = Method::monte_carlo;
    return zp;
}

PosteriorField field_unchecked(const VectorChannel& ch, const Vec& y, const VectorOptions& opt) {
    const int n = ch.dim();
    const auto& in = ch.input();
    const Vec mu = ch.B_inv() * (y - ch.A() * in.shift());
    ZPosterior zp = n == 1 ? z_posterior_1(ch, mu, opt) : n == 2 ? z_posterior_2(ch, mu, opt) : z_posterior_is(ch, mu, opt);
    PosteriorField f;
    const Mat& L = in.mixing();
    f.cond_mean = L * zp.mean + in.shift();
    f.cond_cov = L * zp.cov * L.transpose();
    f.cond_cov = 0.5 * (f.cond_cov + f.cond_cov.transpose());
    f.mean_error = L.cwiseAbs() * zp.mean_err;
    f.log_density = zp.log_mass - 0.5 * n * kLog2Pi - 0.5 * ch.log_det_K_W();
    f.density = std::exp(f.log_density);
    f.ess = zp.ess;
    f.method = zp.method;
    if (Eigen::LLT<Mat>(f.cond_cov).info() != Eigen::Success)
        throw EvaluationError("posterior covariance is not positive definite");
    return f;
}

// Y samples, row-major; chunked with per-chunk sub-seeds
std::vector<double> sample_outputs(const VectorChannel& ch, std::uint64_t seed, std::size_t n) {
    const int d = ch.dim();
    const std::size_t chunks = (n + kChunk - 1) / kChunk;
    std::vector<double> out(n * d);
    const Eigen::LLT<Mat> kw(ch.K_W());
    const Mat Lw = kw.matrixL();
    parallel_for(chunks, [&](std::size_t c) {
        const std::size_t lo = c * kChunk, cnt = std::min(kChunk, n - lo);
        const std::uint64_t cs = splitmix(seed ^ splitmix(c + 1));
        const auto xs = ch.input().sample(cs, cnt);
        std::mt19937_64 g(splitmix(cs ^ 0x6e6f697365ULL));
        std::normal_distribution<double> nd;
        Vec x(d), e(d);
        for (std::size_t k = 0; k < cnt; ++k) {
            for (int i = 0; i < d; ++i) {
                x[i] = xs[k * d + i];
                e[i] = nd(g);
            }
            const Vec y = ch.A() * x + Lw * e;
            for (int i = 0; i < d; ++i) out[(lo + k) * d + i] = y[i];
        }
    });
    return out;
}

EstimateWithError add(const EstimateWithError& a, const EstimateWithError& b, double sa = 1.0, double sb = 1.0) {
    return {sa * a.value + sb * b.value, std::abs(sa) * a.abs_error + std::abs(sb) * b.abs_error,
            (a.method == Method::monte_carlo || b.method == Method::monte_carlo) ? Method::monte_carlo : Method::quadrature};
}

}  // namespace

VectorInput::VectorInput(std::vector<InputDistribution> factors, Mat mixing, Vec shift)
    : factors_(std::move(factors)), L_(std::move(mixing)), m_(std::move(shift)) {
    const int n = static_cast<int>(factors_.size());
    if (n < 1 || n > kMaxVectorDim)
        throw ParameterError("vector input: dimension must lie in [1, " + std::to_string(kMaxVectorDim) + "], got " +
                             std::to_string(n));
    require_square(L_, n, "input mixing matrix");
    if (m_.size() != n || !m_.allFinite()) throw ParameterError("input shift must be a finite " + std::to_string(n) + "-vector");
    const double det = L_.determinant();
    if (!(std::abs(det) > 0.0) || cond_number(L_) > 1e10) throw ParameterError("input mixing matrix is singular");
    L_inv_ = L_.inverse();
    log_abs_det_L_ = std::log(std::abs(det));
}

VectorInput VectorInput::gaussian(const Vec& mean, const Mat& cov) {
    const int n = static_cast<int>(mean.size());
    require_square(cov, n, "gaussian covariance");
    const Eigen::LLT<Mat> llt(cov);
    if (llt.info() != Eigen::Success || (cov - cov.transpose()).norm() > 1e-12 * cov.norm())
        throw ParameterError("gaussian covariance must be symmetric positive definite");
    return VectorInput(std::vector<InputDistribution>(n, make_gaussian(0.0, 1.0)), llt.matrixL(), mean);
}

VectorInput VectorInput::product(std::vector<InputDistribution> factors) {
    const int n = static_cast<int>(factors.size());
    return VectorInput(std::move(factors), Mat::Identity(n, n), Vec::Zero(n));
}

VectorInput VectorInput::correlated_gm2(double v1, double v2, const Mat& mixing) {
    return VectorInput({make_gaussian_mixture_pm1(v1), make_gaussian(0.0, v2)}, mixing, Vec::Zero(2));
}

Vec VectorInput::mean() const {
    Vec mz(dim());
    for (int i = 0; i < dim(); ++i) mz[i] = factors_[i].mean();
    return L_ * mz + m_;
}

Mat VectorInput::cov() const {
    Vec vz(dim());
    for (int i = 0; i < dim(); ++i) vz[i] = factors_[i].variance();
    return L_ * vz.asDiagonal() * L_.transpose();
}

double VectorInput::log_pdf(const Vec& x) const {
    const Vec z = L_inv_ * (x - m_);
    double l = -log_abs_det_L_;
    for (int i = 0; i < dim(); ++i) {
        l += factors_[i].log_pdf(z[i]);
        if (!(l > -kInf)) return -kInf;
    }
    return l;
}

EstimateWithError VectorInput::entropy() const {
    EstimateWithError h{log_abs_det_L_, 0.0, Method::analytic};
    for (const auto& f : factors_) h = add(h, condent::entropy(f));
    if (h.abs_error > 0.0 && h.method == Method::analytic) h.method = Method::quadrature;
    return h;
}

std::vector<double> VectorInput::sample(std::uint64_t seed, std::size_t n) const {
    const int d = dim();
    std::vector<std::vector<double>> zs;
    for (int i = 0; i < d; ++i) zs.push_back(factors_[i].sample(splitmix(seed + 0x1000ULL * (i + 1)), n));
    std::vector<double> out(n * d);
    Vec z(d);
    for (std::size_t k = 0; k < n; ++k) {
        for (int i = 0; i < d; ++i) z[i] = zs[i][k];
        const Vec x = L_ * z + m_;
        for (int i = 0; i < d; ++i) out[k * d + i] = x[i];
    }
    return out;
}

bool VectorInput::is_gaussian() const {
    return std::all_of(factors_.begin(), factors_.end(), [](const auto& f) { return f.name() == "gaussian"; });
}

std::string VectorInput::spec() const {
    if (is_gaussian()) return "gauss(mean=" + vec_str(mean()) + ",cov=" + mat_str(cov()) + ")";
    std::string p = "prod(";
    for (int i = 0; i < dim(); ++i) p += (i ? ";" : "") + factors_[i].spec();
    p += ")";
    if (L_.isIdentity(0.0) && m_.isZero(0.0)) return p;
    return "linear(L=" + mat_str(L_) + ",shift=" + vec_str(m_) + "," + p + ")";
}

VectorChannel::VectorChannel(VectorInput input, Mat A, Mat K_W)
    : input_(std::move(input)), A_(std::move(A)), K_W_(std::move(K_W)) {
    const int n = input_.dim();
    require_square(A_, n, "A");
    require_square(K_W_, n, "K_W");
    const double det = A_.determinant();
    if (!(std::abs(det) > 0.0) || cond_number(A_) > 1e10) throw ParameterError("A must be full rank (condition number < 1e10)");
    if ((K_W_ - K_W_.transpose()).norm() > 1e-12 * K_W_.norm()) throw ParameterError("K_W must be symmetric");
    const Eigen::LLT<Mat> kw(K_W_);
    if (kw.info() != Eigen::Success || cond_number(K_W_) > 1e10) throw ParameterError("K_W must be positive definite");
    if (cond_number(input_.cov()) > 1e8) throw ParameterError("input covariance is (numerically) rank deficient");
    log_abs_det_A_ = std::log(std::abs(det));
    const Mat Lw = kw.matrixL();
    log_det_K_W_ = 2.0 * Lw.diagonal().array().log().sum();
    K_W_inv_ = kw.solve(Mat::Identity(n, n));
    B_ = A_ * input_.mixing();
    B_inv_ = B_.inverse();
    P_ = B_.transpose() * K_W_inv_ * B_;
    P_ = 0.5 * (P_ + P_.transpose());
}

Mat VectorChannel::output_cov() const { return A_ * input_.cov() * A_.transpose() + K_W_; }
Vec VectorChannel::output_mean() const { return A_ * input_.mean(); }

std::string VectorChannel::spec() const {
    return "vec:n=" + std::to_string(dim()) + ",input=" + input_.spec() + ",A=" + mat_str(A_) + ",Kw=" + mat_str(K_W_);
}

PosteriorField posterior_field(const VectorChannel& ch, const Vec& y, const VectorOptions& opt) {
    if (y.size() != ch.dim() || !y.allFinite()) throw ParameterError("y must be a finite " + std::to_string(ch.dim()) + "-vector");
    const Vec d = y - ch.output_mean();
    const double r2 = d.dot(ch.output_cov().llt().solve(d));
    if (r2 > 64.0) throw DomainError("y lies outside the 8-sigma ellipsoid of Y (Mahalanobis " + num(std::sqrt(r2)) + ")");
    return field_unchecked(ch, y, opt);
}

double gaussian_cond_mean_entropy(const Mat& A, const Mat& K_X, const Mat& K_W) {
    const int n = static_cast<int>(A.rows());
    const Mat S = A * K_X * A.transpose() + K_W;
    const double ld_s = 2.0 * Mat(S.llt().matrixL()).diagonal().array().log().sum();
    const double ld_kx = 2.0 * Mat(K_X.llt().matrixL()).diagonal().array().log().sum();
    return 0.5 * (n * (kLog2Pi + 1.0) + 2.0 * std::log(std::abs(A.determinant())) + 2.0 * ld_kx - ld_s);
}

VectorSummary vector_summary(const VectorChannel& ch, const VectorOptions& opt) {
    const int n = ch.dim();
    VectorSummary s;
    s.dim = n;
    s.h_x = ch.input().entropy();
    const Mat ky = ch.output_cov();
    const double ld_ky = 2.0 * Mat(ky.llt().matrixL()).diagonal().array().log().sum();
    const double log_det_akw = ch.log_abs_det_A() - ch.log_det_K_W();
    if (ch.input().is_gaussian()) s.gaussian_closed_form = gaussian_cond_mean_entropy(ch.A(), ch.input().cov(), ch.K_W());

    const std::size_t ny = std::max<std::size_t>(opt.y_samples, 1000);
    const std::size_t nk = n == 1 ? ny : std::max(opt.knn_samples, ny);
    const auto ys = sample_outputs(ch, opt.seed, nk);

    // posterior at the first ny outputs
    std::vector<PosteriorField> fields(ny);
    parallel_for(ny, [&](std::size_t i) {
        const Vec y = Eigen::Map<const Vec>(&ys[i * n], n);
        fields[i] = field_unchecked(ch, y, opt);
    });
    Vec mbar = Vec::Zero(n);
    for (const auto& f : fields) mbar += f.cond_mean;
    mbar /= static_cast<double>(ny);
    // per-sample terms: log det, Var(X|y), Var(X|y) + (m - mbar)(m - mbar)^T
    std::vector<double> ld(ny);
    Mat mm = Mat::Zero(n, n), mm2 = Mat::Zero(n, n), cm = Mat::Zero(n, n), tv = Mat::Zero(n, n), tv2 = Mat::Zero(n, n);
    std::vector<double> cond_means(ny * n);
    for (std::size_t i = 0; i < ny; ++i) {
        const auto& f = fields[i];
        ld[i] = std::log(f.cond_cov.determinant());
        const Vec dm = f.cond_mean - mbar;
        const Mat outer = dm * dm.transpose();
        mm += f.cond_cov;
        mm2 += f.cond_cov.cwiseProduct(f.cond_cov);
        cm += outer;
        const Mat t = f.cond_cov + outer;
        tv += t;
        tv2 += t.cwiseProduct(t);
        for (int j = 0; j < n; ++j) cond_means[i * n + j] = f.cond_mean[j];
    }
    const double N = static_cast<double>(ny);
    auto sem = [N](const Mat& sum, const Mat& sum2) {
        const Mat mean = sum / N;
        return Mat(((sum2 / N - mean.cwiseProduct(mean)).cwiseMax(0.0) / (N - 1.0)).cwiseSqrt());
    };
    s.mmse = mm / N;
    s.mmse_error = sem(mm, mm2);
    s.cov_cond_mean = cm / (N - 1.0);
    s.total_var_error = sem(tv, tv2);
    s.y_samples = ny;

    if (n == 1) {
        // quadrature path through the scalar channel Y/a = X + W/a
        const double a = ch.A()(0, 0);
        const InputDistribution x1 = make_affine(ch.input().factors()[0], ch.input().mixing()(0, 0), ch.input().shift()[0]);
        const ScalarChannel sc(x1, ch.K_W()(0, 0) / (a * a));
        const auto rep = entropy_report(sc);
        s.h_y = add(rep.h_y, EstimateWithError::exact(std::log(std::abs(a))));
        s.truth = rep.h_cond_mean;
        s.e_log_det = add(s.truth, s.h_y, 1.0, -1.0);
        s.mmse = Mat::Constant(1, 1, rep.mmse.value);
        s.mmse_error = Mat::Constant(1, 1, rep.mmse.abs_error);
        s.log_det_mmse = {std::log(rep.mmse.value), rep.mmse.abs_error / rep.mmse.value, Method::quadrature};
        s.knn_samples = 0;
    } else {
        s.h_y = knn_entropy(ys, n, opt.knn_k, splitmix(opt.seed ^ 0x6b6e6eULL));
        s.knn_samples = nk;
        double m = 0.0, m2 = 0.0;
        for (double v : ld) {
            m += v;
            m2 += v * v;
        }
        m /= N;
        const double sd = std::sqrt(std::max(m2 / N - m * m, 0.0) * N / (N - 1.0));
        s.e_log_det = {m + log_det_akw, sd / std::sqrt(N), Method::monte_carlo};
        s.truth = add(s.h_y, s.e_log_det);
        // first-order error of log det through d log det = tr(M^-1 dM)
        const Mat minv = s.mmse.inverse();
        s.log_det_mmse = {std::log(s.mmse.determinant()), (minv.transpose().cwiseAbs().cwiseProduct(s.mmse_error)).sum(),
                          Method::monte_carlo};
    }
    s.truth_knn = knn_entropy(cond_means, n, opt.knn_k, splitmix(opt.seed ^ 0x636d6eULL));
    s.cross_check_ok = std::abs(s.truth.value - s.truth_knn.value) <=
                       combined_tolerance({s.truth.abs_error, s.truth_knn.abs_error});

    const auto ld_term = EstimateWithError{s.log_det_mmse.value + log_det_akw, s.log_det_mmse.abs_error, s.log_det_mmse.method};
    s.lower_main = add(add(s.h_x, s.h_y, 2.0, -1.0), EstimateWithError::exact(ch.log_abs_det_A()));
    s.ub_jensen = add(s.h_y, ld_term);
    s.ub_maxent = add(EstimateWithError::exact(0.5 * (n * (kLog2Pi + 1.0) + ld_ky)), ld_term);
    return s;
}

EstimateWithError entropy_cond_mean_vec(const VectorChannel& ch, const VectorOptions& opt) {
    return vector_summary(ch, opt).truth;
}

VectorBounds vector_bounds(const VectorChannel& ch, const VectorOptions& opt) {
    const auto s = vector_summary(ch, opt);
    return {s.lower_main, s.ub_jensen, s.ub_maxent, s.truth};
}

JacobianCheck jacobian_check(const VectorChannel& ch, const Vec& y, const VectorOptions& opt) {
    const int n = ch.dim();
    const PosteriorField f0 = posterior_field(ch, y, opt);
    const Mat ky = ch.output_cov();
    JacobianCheck jc;
    jc.fd = Mat(n, n);
    for (int i = 0; i < n; ++i) {
        const double h = 1e-3 * std::sqrt(ky(i, i));
        auto at = [&](double t) {
            Vec yy = y;
            yy[i] += t;
            return field_unchecked(ch, yy, opt).cond_mean;
        };
        const Vec d1 = (at(h) - at(-h)) / (2.0 * h);
        const Vec d2 = (at(2.0 * h) - at(-2.0 * h)) / (4.0 * h);
        jc.fd.row(i) = ((4.0 * d1 - d2) / 3.0).transpose();
    }
    jc.standard = ch.K_W_inv() * ch.A() * f0.cond_cov;
    jc.printed = ch.A().inverse() * ch.K_W_inv() * ch.A() * f0.cond_cov * ch.A().transpose();
    jc.rel_err_standard = (jc.fd - jc.standard).norm() / jc.standard.norm();
    jc.rel_err_printed = (jc.fd - jc.printed).norm() / jc.printed.norm();
    const double ds = jc.standard.determinant();
    jc.det_rel_err = std::abs(jc.fd.determinant() - ds) / std::abs(ds);
    return jc;
}

}  // namespace condent
