#pragma once

#include "insurelab/pmf.hpp"

namespace insurelab {

/// Relative entropy sum_y p(y) log2(p(y)/q(y)); +infinity when p places mass
/// outside the support of q.
double kl_div(const Pmf& p, const Pmf& q);

/// Symmetrized divergence D(p || (p+q)/2) + D(q || (p+q)/2) in bits.
/// Always in [0, 2]; zero iff p and q agree. Infinite tails are summed until
/// the remaining mass contributes less than 1e-12.
double jdist(const Pmf& p, const Pmf& q);

/// l1 distance sum_y |p(y) - q(y)|, in [0, 2].
double l1_dist(const Pmf& p, const Pmf& q);

}  // namespace insurelab
