#include "insurelab/divergence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace insurelab {

namespace {

// Visit the union of the two tables in increasing symbol order. For the
// geometric kind the table already carries all but < 1e-12 of the mass.
template <typename Fn>
void for_union_support(const Pmf& p, const Pmf& q, Fn&& fn) {
    const auto& sp = p.table_support();
    const auto& sq = q.table_support();
    std::size_t i = 0, j = 0;
    while (i < sp.size() || j < sq.size()) {
        std::uint64_t y;
        if (j >= sq.size() || (i < sp.size() && sp[i] <= sq[j]))
            y = sp[i];
        else
            y = sq[j];
        const double py = (i < sp.size() && sp[i] == y) ? p.table_probs()[i] : p.prob(y);
        const double qy = (j < sq.size() && sq[j] == y) ? q.table_probs()[j] : q.prob(y);
        if (i < sp.size() && sp[i] == y) ++i;
        if (j < sq.size() && sq[j] == y) ++j;
        fn(y, py, qy);
    }
}

}  // namespace

double kl_div(const Pmf& p, const Pmf& q) {
    // A table can never cover the whole of an unbounded support.
    if (p.infinite_support() && !q.infinite_support())
        return std::numeric_limits<double>::infinity();
    double sum = 0.0;
    const auto& sp = p.table_support();
    const auto& pp = p.table_probs();
    for (std::size_t i = 0; i < sp.size(); ++i) {
        const double qy = q.prob(sp[i]);
        if (qy <= 0.0) return std::numeric_limits<double>::infinity();
        sum += pp[i] * std::log2(pp[i] / qy);
    }
    return sum;
}

double jdist(const Pmf& p, const Pmf& q) {
    double sum = 0.0;
    for_union_support(p, q, [&](std::uint64_t, double py, double qy) {
        const double m = 0.5 * (py + qy);
        if (py > 0.0) sum += py * std::log2(py / m);
        if (qy > 0.0) sum += qy * std::log2(qy / m);
    });
    return std::max(0.0, sum);
}

double l1_dist(const Pmf& p, const Pmf& q) {
    double sum = 0.0;
    for_union_support(p, q, [&](std::uint64_t, double py, double qy) { sum += std::abs(py - qy); });
    return sum;
}

}  // namespace insurelab
