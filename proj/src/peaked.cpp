#include "condent/peaked.hpp"

namespace condent {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEps = std::numeric_limits<double>::epsilon();
}  // namespace

std::vector<double> peak_candidates(Interval dom, double mean, double sd, const std::vector<double>& landmarks,
                                    int ladder_min, int ladder_max, int scan_points) {
    std::vector<double> cand = landmarks;
    for (double k : {-8.0, -4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0, 8.0}) cand.push_back(mean + k * sd);
    const bool lo_fin = std::isfinite(dom.lo), hi_fin = std::isfinite(dom.hi);
    if (lo_fin && hi_fin) {
        const double w = dom.hi - dom.lo;
        for (int i = 0; i <= scan_points; ++i) cand.push_back(dom.lo + w * i / scan_points);
        for (double k = 1e-12; k < 0.01; k *= 10.0) {
            cand.push_back(dom.lo + k * w);
            cand.push_back(dom.hi - k * w);
        }
    } else {
        const double anchor_lo = lo_fin ? dom.lo : mean;
        const double anchor_hi = hi_fin ? dom.hi : mean;
        for (int k = ladder_min; k <= ladder_max; ++k) {
            const double step = sd * std::ldexp(1.0, k);
            if (!hi_fin) cand.push_back(anchor_lo + step);
            if (!lo_fin) cand.push_back(anchor_hi - step);
        }
    }
    return cand;
}

namespace detail {

PeakFrame locate_peak(const PeakedProblem& p) {
    PeakFrame fr;
    const Interval dom = p.dom;
    auto log_f = [&](double x) {
        if (x < dom.lo || x > dom.hi) return -kInf;
        return p.log_w_t(x - p.origin);
    };

    std::vector<double> cand = p.candidates;
    std::erase_if(cand, [&](double x) { return !(x > dom.lo && x < dom.hi); });
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
    if (cand.empty()) {
        fr.status = PeakStatus::no_mass;
        return fr;
    }

    std::vector<double> lv(cand.size());
    std::size_t best = 0;
    for (std::size_t i = 0; i < cand.size(); ++i) {
        lv[i] = log_f(cand[i]);
        if (std::isnan(lv[i])) lv[i] = -kInf;
        if (lv[i] > lv[best]) best = i;
    }
    double lmax = lv[best];
    double mode = cand[best];
    if (!std::isfinite(lmax)) {
        fr.status = lmax == kInf ? PeakStatus::diverges : PeakStatus::no_mass;
        return fr;
    }
    {
        double a = best > 0 ? cand[best - 1] : dom.lo;
        double b = best + 1 < cand.size() ? cand[best + 1] : dom.hi;
        if (std::isfinite(a) && std::isfinite(b)) {
            const double g = 0.5 * (std::sqrt(5.0) - 1.0);
            double x1 = b - g * (b - a), x2 = a + g * (b - a);
            double f1 = log_f(x1), f2 = log_f(x2);
            for (int it = 0; it < 80 && b - a > p.mode_rel_tol * std::max(1.0, std::abs(mode)); ++it) {
                if (f1 < f2) {
                    a = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = a + g * (b - a);
                    f2 = log_f(x2);
                } else {
                    b = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = b - g * (b - a);
                    f1 = log_f(x1);
                }
            }
            if (std::max(f1, f2) > lmax) {
                lmax = std::max(f1, f2);
                mode = f1 > f2 ? x1 : x2;
            }
        }
    }

    // candidates within 60 nats of the peak, plus one neighbour each side
    std::size_t ia = cand.size(), ib = 0;
    for (std::size_t i = 0; i < cand.size(); ++i)
        if (lv[i] >= lmax - 60.0) {
            ia = std::min(ia, i);
            ib = std::max(ib, i);
        }
    if (ia > ib) ia = ib = best;
    if (ia > 0) --ia;
    if (ib + 1 < cand.size()) ++ib;
    double xa = cand[ia], xb = cand[ib];

    // walk out of the mode geometrically; the candidates can be far coarser than a sharp peak
    std::vector<double> walk;
    double wa = mode, wb = mode;
    const double h0 = p.walk_start > 0.0 ? p.walk_start : 1e-9 * std::max({std::abs(mode), p.ref_scale, 1e-300});
    for (double dir : {-1.0, 1.0}) {
        for (double h = h0; h < kInf; h *= 2.0) {
            double x = mode + dir * h;
            const bool edge = !(x > dom.lo && x < dom.hi);
            if (edge) x = dir < 0 ? dom.lo : dom.hi;
            const double drop = lmax - log_f(x);
            if (drop > 0.1 && !edge) walk.push_back(x);
            if (edge || !(drop <= 60.0)) {
                (dir < 0 ? wa : wb) = x;
                break;
            }
        }
    }
    xa = std::min(xa, wa);
    xb = std::max(xb, wb);
    fr.scale = std::max(std::min(xb - xa, wb - wa) / 16.0, 1e-300);

    IntegrationOptions& opt = fr.opt;
    opt.abs_tol = 0.0;
    opt.rel_tol = std::max(p.rel_tol, 64.0 * kEps * std::abs(lmax));
    opt.max_intervals = 4000;
    opt.sqrt_lo = p.sqrt_lo;
    opt.sqrt_hi = p.sqrt_hi;
    opt.tail_power = p.tail_power;
    opt.tail_scale = fr.scale * 4.0;
    // probes and walk points thinned to a spacing of twice the scale; the mode and landmarks always stay
    std::vector<double> pts(cand.begin() + ia, cand.begin() + ib + 1);
    pts.insert(pts.end(), walk.begin(), walk.end());
    std::sort(pts.begin(), pts.end());
    double last = -kInf;
    for (double x : pts)
        if (x - last >= 2.0 * fr.scale && std::abs(x - mode) >= 2.0 * fr.scale) {
            opt.breakpoints.push_back(x);
            last = x;
        }
    opt.breakpoints.push_back(mode);
    opt.breakpoints.insert(opt.breakpoints.end(), p.landmarks.begin(), p.landmarks.end());
    // probes hugging a finite edge would cut off the end map there
    const double near = 1e-6 * (xb - xa);
    std::erase_if(opt.breakpoints, [&](double x) { return !(x - dom.lo >= near && dom.hi - x >= near); });
    for (auto& b : opt.breakpoints) b -= p.origin;

    fr.lmax = lmax;
    fr.mode = mode;
    return fr;
}

}  // namespace detail

}  // namespace condent
