#include "condent/quadrature.hpp"

#include <map>
#include <memory>
#include <mutex>

#include <Eigen/Eigenvalues>

namespace condent {

namespace detail {

std::vector<Piece> make_pieces(Interval iv, const IntegrationOptions& opt) {
    if (!(iv.lo < iv.hi)) throw ParameterError("integration interval must satisfy lo < hi");
    if (std::isnan(iv.lo) || std::isnan(iv.hi)) throw ParameterError("integration interval contains NaN");
    if (!(opt.tail_scale > 0.0)) throw ParameterError("tail_scale must be positive");
    if (opt.tail_power != 1 && opt.tail_power != 2) throw ParameterError("tail_power must be 1 or 2");

    std::vector<double> pts;
    pts.push_back(iv.lo);
    for (double b : opt.breakpoints)
        if (std::isfinite(b) && b > iv.lo && b < iv.hi) pts.push_back(b);
    pts.push_back(iv.hi);
    std::sort(pts.begin() + 1, pts.end() - 1);
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    // a doubly infinite interval needs at least one finite split point
    if (pts.size() == 2 && std::isinf(iv.lo) && std::isinf(iv.hi)) pts.insert(pts.begin() + 1, 0.0);

    const bool lo_finite = std::isfinite(iv.lo);
    const bool hi_finite = std::isfinite(iv.hi);
    std::vector<Piece> out;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double a = pts[i];
        const double b = pts[i + 1];
        const bool first = (i == 0);
        const bool last = (i + 2 == pts.size());
        const bool sq_lo = first && lo_finite && opt.sqrt_lo;
        const bool sq_hi = last && hi_finite && opt.sqrt_hi;
        const bool p2 = opt.tail_power == 2;
        MapKind k;
        if (std::isinf(a)) {
            // the power-2 map already starts quadratically at the finite end
            k = (sq_hi && !p2) ? MapKind::left_inf_sqrt : MapKind::left_inf;
        } else if (std::isinf(b)) {
            k = (sq_lo && !p2) ? MapKind::right_inf_sqrt : MapKind::right_inf;
        } else if (sq_lo && sq_hi) {
            k = MapKind::smoothstep;
        } else if (sq_lo) {
            k = MapKind::sqrt_lo;
        } else if (sq_hi) {
            k = MapKind::sqrt_hi;
        } else {
            k = MapKind::linear;
        }
        out.push_back({k, a, b, p2 ? 2 : 1});
    }
    return out;
}

}  // namespace detail

QuadratureRule gauss_hermite(int order) {
    if (order < 1 || order > 512)
        throw ParameterError("Gauss-Hermite order must lie in [1, 512], got " + std::to_string(order));
    const int n = order;
    QuadratureRule r;
    r.kind = RuleKind::gauss_hermite;
    r.nodes.resize(n);
    r.weights.resize(n);
    r.log_weights.resize(n);
    if (n == 1) {
        r.nodes[0] = 0.0;
        r.weights[0] = std::sqrt(M_PI);
        r.log_weights[0] = 0.5 * std::log(M_PI);
        return r;
    }
    // Golub-Welsch eigenvalues for starting points, then Newton on the
    // orthonormal recurrence. Weights come out in log form: w = 2 / p_n'(x)^2.
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd sub(n - 1);
    for (int k = 1; k < n; ++k) sub[k - 1] = std::sqrt(0.5 * k);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    const Eigen::VectorXd ev = es.eigenvalues();

    const double p0 = std::pow(M_PI, -0.25);
    // returns p_n(x)/p_n'(x) and log|p_n'(x)|, with rescaling to avoid overflow
    auto recur = [&](double x, double& log_dpn) {
        double pm1 = 0.0, p = p0, logscale = 0.0;
        for (int j = 1; j <= n; ++j) {
            const double pn = x * std::sqrt(2.0 / j) * p - std::sqrt((j - 1.0) / j) * pm1;
            pm1 = p;
            p = pn;
            const double m = std::abs(p);
            if (m > 1e150) {
                p /= 1e150;
                pm1 /= 1e150;
                logscale += std::log(1e150);
            }
        }
        // p = p_n, pm1 = p_{n-1} (both scaled by exp(-logscale))
        const double dpn = std::sqrt(2.0 * n) * pm1;
        log_dpn = std::log(std::abs(dpn)) + logscale;
        return p / dpn;
    };
    for (int i = 0; i < n; ++i) {
        double x = ev[i];
        double log_dpn = 0.0;
        for (int it = 0; it < 8; ++it) {
            const double dx = recur(x, log_dpn);
            x -= dx;
            if (std::abs(dx) <= 1e-16 * std::max(1.0, std::abs(x))) break;
        }
        recur(x, log_dpn);
        r.nodes[i] = x;
        r.log_weights[i] = std::log(2.0) - 2.0 * log_dpn;
    }
    // exact antisymmetry of the nodes
    for (int i = 0; i < n / 2; ++i) {
        const double x = 0.5 * (r.nodes[n - 1 - i] - r.nodes[i]);
        const double lw = 0.5 * (r.log_weights[i] + r.log_weights[n - 1 - i]);
        r.nodes[i] = -x;
        r.nodes[n - 1 - i] = x;
        r.log_weights[i] = r.log_weights[n - 1 - i] = lw;
    }
    if (n % 2 == 1) r.nodes[n / 2] = 0.0;
    for (int i = 0; i < n; ++i) r.weights[i] = std::exp(r.log_weights[i]);
    return r;
}

const QuadratureRule& gauss_hermite_table(int order) {
    static std::mutex mu;
    static std::map<int, std::unique_ptr<QuadratureRule>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(order);
    if (it == cache.end()) it = cache.emplace(order, std::make_unique<QuadratureRule>(gauss_hermite(order))).first;
    return *it->second;
}

AdaptiveResult<1> integrate_nothrow(const std::function<double(double)>& f, Interval iv,
                                    const IntegrationOptions& opt) {
    auto g = [&f](double x) { return std::array<double, 1>{f(x)}; };
    return integrate_adaptive<1>(g, iv, opt, {1.0});
}

EstimateWithError integrate(const std::function<double(double)>& f, Interval iv,
                            const IntegrationOptions& opt) {
    const auto r = integrate_nothrow(f, iv, opt);
    EstimateWithError est{r.value[0], r.error[0], Method::quadrature};
    if (!r.converged)
        throw ConvergenceError("adaptive quadrature did not reach tolerance after " +
                                   std::to_string(r.intervals) + " subintervals (estimate " +
                                   std::to_string(est.value) + " +- " + std::to_string(est.abs_error) + ")",
                               est);
    return est;
}

EstimateWithError integrate(const std::function<double(double)>& f, Interval iv, double tol) {
    if (!(tol > 0.0)) throw ParameterError("tolerance must be positive");
    IntegrationOptions opt;
    opt.abs_tol = tol;
    return integrate(f, iv, opt);
}

QuadratureRule adaptive_rule(const std::function<double(double)>& f, Interval iv,
                             const IntegrationOptions& opt) {
    // Re-run the refinement while recording leaf segments.
    using Seg = detail::Segment<1>;
    const auto pieces = detail::make_pieces(iv, opt);
    std::vector<std::pair<int, std::pair<double, double>>> leaves;
    {
        // Reproduce integrate_adaptive but keep segment bounds.
        std::vector<Seg> segs;
        auto eval = [&](int pi) {
            const detail::Piece p = pieces[pi];
            return [&, p](double u) {
                double jac = 0.0;
                const double x = detail::map_point(p, u, opt.tail_scale, jac);
                if (!std::isfinite(x) || jac == 0.0) return std::array<double, 1>{0.0};
                return std::array<double, 1>{f(x) * jac};
            };
        };
        auto mk = [&](int pi, double a, double b) {
            Seg s{pi, a, b, {}, {}, 0.0};
            auto g = eval(pi);
            detail::gk21<1>(g, a, b, s.val, s.err);
            s.norm = s.err[0];
            return s;
        };
        for (int i = 0; i < static_cast<int>(pieces.size()); ++i) segs.push_back(mk(i, 0.0, 1.0));
        auto total = [&](double& v, double& e) {
            v = e = 0.0;
            for (auto& s : segs) {
                v += s.val[0];
                e += s.err[0];
            }
        };
        double v, e;
        total(v, e);
        while (static_cast<int>(segs.size()) < opt.max_intervals &&
               e > std::max(opt.abs_tol, opt.rel_tol * std::abs(v))) {
            auto it = std::max_element(segs.begin(), segs.end(),
                                       [](const Seg& a, const Seg& b) { return a.norm < b.norm; });
            const Seg p = *it;
            const double mid = 0.5 * (p.ua + p.ub);
            if (p.ub - p.ua < 1e-13) break;
            *it = mk(p.piece, p.ua, mid);
            segs.push_back(mk(p.piece, mid, p.ub));
            total(v, e);
        }
        for (auto& s : segs) leaves.push_back({s.piece, {s.ua, s.ub}});
    }
    std::sort(leaves.begin(), leaves.end());
    using boost::math::quadrature::gauss_kronrod;
    const auto& xgk = gauss_kronrod<double, 21>::abscissa();
    const auto& wgk = gauss_kronrod<double, 21>::weights();
    QuadratureRule r;
    r.kind = RuleKind::adaptive_interval;
    for (const auto& [pi, ab] : leaves) {
        const double c = 0.5 * (ab.first + ab.second);
        const double h = 0.5 * (ab.second - ab.first);
        for (int j = -10; j <= 10; ++j) {
            const double u = c + h * (j < 0 ? -xgk[-j] : xgk[j]);
            const double wu = wgk[std::abs(j)] * h;
            double jac = 0.0;
            const double x = detail::map_point(pieces[pi], u, opt.tail_scale, jac);
            if (!std::isfinite(x) || !(jac > 0.0)) continue;
            r.nodes.push_back(x);
            r.weights.push_back(wu * jac);
            r.log_weights.push_back(std::log(wu * jac));
        }
    }
    return r;
}

double gaussian_expectation(const std::function<double(double)>& g, double mean, double var, int order) {
    if (!(var >= 0.0)) throw ParameterError("variance must be nonnegative");
    const auto& rule = gauss_hermite_table(order);
    const double s = std::sqrt(2.0 * var);
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        if (rule.weights[i] == 0.0) continue;
        acc += rule.weights[i] * g(mean + s * rule.nodes[i]);
    }
    return acc / std::sqrt(M_PI);
}

}  // namespace condent
