#include "condent/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "condent/errors.hpp"
#include "condent/special.hpp"

namespace condent {

EstimateWithError entropy_from_pdf(const std::function<double(double)>& pdf, Interval support, double tol) {
    return entropy_from_pdf(pdf, support, tol, IntegrationOptions{});
}

EstimateWithError entropy_from_pdf(const std::function<double(double)>& pdf, Interval support, double tol,
                                   const IntegrationOptions& hints) {
    if (!(tol > 0.0)) throw ParameterError("entropy_from_pdf: tolerance must be positive");
    IntegrationOptions opt = hints;
    opt.abs_tol = tol;
    opt.rel_tol = 0.0;
    auto g = [&pdf](double x) {
        const double p = pdf(x);
        if (!(p >= 0.0)) throw EvaluationError("pdf negative or NaN at x = " + std::to_string(x));
        const double plogp = p < kPdfFloor ? 0.0 : -p * std::log(p);
        return std::array<double, 2>{p, plogp};
    };
    const auto r = integrate_adaptive<2>(g, support, opt, {1.0, 1.0});
    const double mass = r.value[0];
    if (std::abs(mass - 1.0) > 10.0 * tol + r.error[0])
        throw InputError("pdf integrates to " + std::to_string(mass) + ", not 1");
    EstimateWithError est{r.value[1], r.error[1], Method::quadrature};
    if (!r.converged) throw ConvergenceError("entropy quadrature did not converge", est);
    return est;
}

namespace {

// Distances to the k nearest neighbours in 1-D: walk outwards in sorted order.
std::vector<double> knn_sqdist_1d(const std::vector<double>& sorted, int k) {
    const std::size_t n = sorted.size();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t l = i, r = i;
        double dk = 0.0;
        for (int c = 0; c < k; ++c) {
            const double dl = l > 0 ? sorted[i] - sorted[l - 1] : INFINITY;
            const double dr = r + 1 < n ? sorted[r + 1] - sorted[i] : INFINITY;
            if (dl <= dr) {
                dk = dl;
                --l;
            } else {
                dk = dr;
                ++r;
            }
        }
        out[i] = dk * dk;
    }
    return out;
}

class KdTree {
public:
    KdTree(std::vector<double> pts, int dim) : d_(dim), pts_(std::move(pts)) {
        n_ = static_cast<int>(pts_.size() / d_);
        idx_.resize(n_);
        std::iota(idx_.begin(), idx_.end(), 0);
        nodes_.reserve(2 * n_ / kLeaf + 8);
        build(0, n_);
        // store points in tree order for locality
        std::vector<double> re(pts_.size());
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < d_; ++j) re[i * d_ + j] = pts_[static_cast<std::size_t>(idx_[i]) * d_ + j];
        pts_.swap(re);
    }

    int size() const { return n_; }

    // squared distance to the k-th nearest neighbour of stored point i (tree order)
    double kth_sqdist(int i, int k) const {
        best_.assign(k, INFINITY);
        query(0, &pts_[static_cast<std::size_t>(i) * d_], i, k);
        return best_[k - 1];
    }

private:
    static constexpr int kLeaf = 12;
    struct Node {
        int lo, hi, left, right, dim;
        double split;
    };

    int build(int lo, int hi) {
        const int id = static_cast<int>(nodes_.size());
        nodes_.push_back({lo, hi, -1, -1, 0, 0.0});
        if (hi - lo <= kLeaf) return id;
        int dim = 0;
        double spread = -1.0;
        for (int j = 0; j < d_; ++j) {
            double mn = INFINITY, mx = -INFINITY;
            for (int i = lo; i < hi; ++i) {
                const double v = pts_[static_cast<std::size_t>(idx_[i]) * d_ + j];
                mn = std::min(mn, v);
                mx = std::max(mx, v);
            }
            if (mx - mn > spread) {
                spread = mx - mn;
                dim = j;
            }
        }
        const int mid = lo + (hi - lo) / 2;
        std::nth_element(idx_.begin() + lo, idx_.begin() + mid, idx_.begin() + hi, [&](int a, int b) {
            return pts_[static_cast<std::size_t>(a) * d_ + dim] < pts_[static_cast<std::size_t>(b) * d_ + dim];
        });
        const double split = pts_[static_cast<std::size_t>(idx_[mid]) * d_ + dim];
        const int l = build(lo, mid);
        const int r = build(mid, hi);
        nodes_[id].left = l;
        nodes_[id].right = r;
        nodes_[id].dim = dim;
        nodes_[id].split = split;
        return id;
    }

    void offer(double s, int k) const {
        if (s >= best_[k - 1]) return;
        int p = k - 1;
        while (p > 0 && best_[p - 1] > s) {
            best_[p] = best_[p - 1];
            --p;
        }
        best_[p] = s;
    }

    void query(int node, const double* q, int self, int k) const {
        const Node& nd = nodes_[node];
        if (nd.left < 0) {
            for (int i = nd.lo; i < nd.hi; ++i) {
                if (i == self) continue;
                const double* p = &pts_[static_cast<std::size_t>(i) * d_];
                double s = 0.0;
                for (int j = 0; j < d_; ++j) {
                    const double t = p[j] - q[j];
                    s += t * t;
                }
                offer(s, k);
            }
            return;
        }
        const double diff = q[nd.dim] - nd.split;
        const int near = diff < 0.0 ? nd.left : nd.right;
        const int far = diff < 0.0 ? nd.right : nd.left;
        query(near, q, self, k);
        if (diff * diff < best_[k - 1]) query(far, q, self, k);
    }

    int d_;
    int n_ = 0;
    std::vector<double> pts_;
    std::vector<int> idx_;
    std::vector<Node> nodes_;
    mutable std::vector<double> best_;
};

std::size_t count_ties(const std::vector<double>& samples, int dim) {
    const std::size_t n = samples.size() / dim;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    auto row = [&](std::size_t i) { return &samples[i * dim]; };
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::lexicographical_compare(row(a), row(a) + dim, row(b), row(b) + dim);
    });
    std::size_t ties = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (std::equal(row(order[i]), row(order[i]) + dim, row(order[i - 1]))) ++ties;
    return ties;
}

}  // namespace

EstimateWithError knn_entropy(const std::vector<double>& samples, int dim, int k, std::uint64_t seed) {
    if (dim < 1) throw ParameterError("knn_entropy: dimension must be >= 1");
    if (k < 1) throw ParameterError("knn_entropy: k must be >= 1");
    if (samples.size() % static_cast<std::size_t>(dim) != 0)
        throw ParameterError("knn_entropy: sample buffer is not a multiple of the dimension");
    const std::size_t n = samples.size() / dim;
    if (n < 1000) throw ParameterError("knn_entropy: need at least 1000 samples, got " + std::to_string(n));
    if (static_cast<std::size_t>(k) >= n) throw ParameterError("knn_entropy: k must be below the sample count");
    for (double v : samples)
        if (!std::isfinite(v)) throw EvaluationError("knn_entropy: non-finite sample");

    const std::size_t ties = count_ties(samples, dim);
    if (ties * 100 >= n)
        throw DegenerateSampleError("knn_entropy: " + std::to_string(ties) + " exact ties among " +
                                    std::to_string(n) + " samples");

    std::vector<double> sq;
    if (dim == 1) {
        std::vector<double> sorted = samples;
        std::sort(sorted.begin(), sorted.end());
        sq = knn_sqdist_1d(sorted, k);
    } else {
        KdTree tree(samples, dim);
        sq.resize(n);
        for (std::size_t i = 0; i < n; ++i) sq[i] = tree.kth_sqdist(static_cast<int>(i), k);
    }
    // per-point terms d log eps_i; points sitting on >= k duplicates carry no information
    std::vector<double> terms;
    terms.reserve(n);
    for (double s : sq)
        if (s > 0.0) terms.push_back(0.5 * dim * std::log(s));
    const std::size_t m = terms.size();

    const double log_vd = 0.5 * dim * std::log(M_PI) - log_gamma(0.5 * dim + 1.0);
    const double offset = digamma(static_cast<double>(n)) - digamma(static_cast<double>(k)) + log_vd;
    auto mean_of = [&](const std::vector<double>& t) {
        double acc = 0.0;
        for (double v : t) acc += v;
        return acc / static_cast<double>(t.size());
    };
    const double est = offset + mean_of(terms);

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, m - 1);
    std::vector<double> boots;
    for (int b = 0; b < kKnnBootstrap; ++b) {
        double acc = 0.0;
        for (std::size_t i = 0; i < m; ++i) acc += terms[pick(rng)];
        boots.push_back(acc / static_cast<double>(m));
    }
    const double bm = mean_of(boots);
    double var = 0.0;
    for (double v : boots) var += (v - bm) * (v - bm);
    var /= (kKnnBootstrap - 1);
    return {est, std::sqrt(var), Method::monte_carlo};
}

EstimateWithError knn_entropy(const std::vector<std::vector<double>>& samples, int k, std::uint64_t seed) {
    if (samples.empty()) throw ParameterError("knn_entropy: empty sample set");
    const int dim = static_cast<int>(samples.front().size());
    std::vector<double> flat;
    flat.reserve(samples.size() * dim);
    for (const auto& s : samples) {
        if (static_cast<int>(s.size()) != dim) throw ParameterError("knn_entropy: ragged sample vectors");
        flat.insert(flat.end(), s.begin(), s.end());
    }
    return knn_entropy(flat, dim, k, seed);
}

}  // namespace condent
