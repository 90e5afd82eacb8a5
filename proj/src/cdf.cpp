#include "insurelab/cdf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace insurelab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double geometric_cum_at(double rho, double k) {
    // cumulative mass at integer k, k >= 0
    return 1.0 - std::pow(rho, k + 1.0);
}

}  // namespace

PiecewiseLinearCdf build_cdf(const Pmf& p) {
    PiecewiseLinearCdf cdf;
    if (p.infinite_support()) {
        cdf.geometric_ = true;
        cdf.rho_ = p.geometric_rho();
    }
    const auto& support = p.table_support();
    const auto& probs = p.table_probs();
    cdf.knots_.reserve(support.size() + 1);
    if (support.front() > 0) cdf.knots_.push_back({0.0, 0.0});
    double acc = 0.0;
    for (std::size_t i = 0; i < support.size(); ++i) {
        acc += probs[i];
        cdf.knots_.push_back({static_cast<double>(support[i]), acc});
    }
    if (!cdf.geometric_) cdf.knots_.back().f = 1.0;  // snap the rounding residue
    return cdf;
}

double PiecewiseLinearCdf::operator()(double y) const {
    if (std::isinf(y)) return 1.0;
    if (!(y >= 0.0)) throw std::domain_error("cdf: evaluation point must be nonnegative");
    if (geometric_) {
        const double k = std::floor(y);
        const double lo = geometric_cum_at(rho_, k);
        const double hi = geometric_cum_at(rho_, k + 1.0);
        return lo + (y - k) * (hi - lo);
    }
    if (y >= knots_.back().y) return 1.0;
    if (y <= knots_.front().y) return knots_.front().f;
    auto it = std::lower_bound(knots_.begin(), knots_.end(), y,
                               [](const CdfKnot& k, double v) { return k.y < v; });
    if (it->y == y) return it->f;
    const CdfKnot& hi = *it;
    const CdfKnot& lo = *(it - 1);
    return lo.f + (y - lo.y) / (hi.y - lo.y) * (hi.f - lo.f);
}

double PiecewiseLinearCdf::inverse(double x) const {
    if (!(x >= 0.0) || !(x <= 1.0)) throw std::domain_error("cdf: inverse argument must lie in [0,1]");
    if (geometric_) {
        if (x >= 1.0) return kInf;
        if (x <= geometric_cum_at(rho_, 0.0)) return 0.0;
        // smallest integer k with F(k) >= x, then solve on [k-1, k]
        double k = std::ceil(std::log1p(-x) / std::log(rho_) - 1.0);
        while (k > 1.0 && geometric_cum_at(rho_, k - 1.0) >= x) k -= 1.0;
        while (geometric_cum_at(rho_, k) < x) k += 1.0;
        const double lo = geometric_cum_at(rho_, k - 1.0);
        const double hi = geometric_cum_at(rho_, k);
        return (k - 1.0) + (x - lo) / (hi - lo);
    }
    if (x <= knots_.front().f) return knots_.front().y;
    auto it = std::lower_bound(knots_.begin(), knots_.end(), x,
                               [](const CdfKnot& k, double v) { return k.f < v; });
    // x <= 1 = knots_.back().f, so `it` is always valid here
    const CdfKnot& hi = *it;
    const CdfKnot& lo = *(it - 1);
    return lo.y + (x - lo.f) / (hi.f - lo.f) * (hi.y - lo.y);
}

TailHeadReport tail_head(const Pmf& p, double delta) {
    if (!(delta > 0.0) || !(delta < 1.0))
        throw std::domain_error("tail_head: delta must lie in (0,1)");
    const PiecewiseLinearCdf cdf = build_cdf(p);
    TailHeadReport r;
    r.delta = delta;
    r.tail_threshold = cdf.inverse(1.0 - delta);
    r.head_threshold = 2.0 * cdf.inverse(1.0 - delta / 2.0);
    const auto tail_start = static_cast<std::uint64_t>(std::max(0.0, std::ceil(r.tail_threshold)));
    r.tail_mass = p.tail_from(tail_start);
    const auto head_end = static_cast<std::uint64_t>(std::max(0.0, std::floor(r.head_threshold)));
    r.head_mass = p.cum(head_end);
    return r;
}

}  // namespace insurelab
