#pragma once

#include <cstdint>
#include <vector>

#include "insurelab/pmf.hpp"

namespace insurelab {

struct CdfKnot {
    double y;
    double f;
};

/// Cumulative distribution function with the conventions used throughout the
/// domination analysis:
///
///   - F(y) at a support point equals the cumulative mass up to and
///     including y, and F interpolates linearly between consecutive support
///     points, so F is continuous and strictly increasing there.
///   - When the smallest support point m is positive, F ramps linearly from
///     (0, 0) up to (m, F(m)). F is then continuous and strictly increasing
///     on all of [0, last support point], and F(0) = 0 whenever 0 carries no
///     mass.
///   - F(infinity) = 1. For the geometric kind every query is answered from
///     the closed form, so inverse(1) = infinity and quantile queries are
///     exact at any probability level.
///
/// inverse(x) returns inf{y : F(y) >= x}; in particular inverse(x) = 0 for
/// every x <= F(0).
class PiecewiseLinearCdf {
public:
    double operator()(double y) const;
    double inverse(double x) const;

    bool infinite_support() const { return geometric_; }
    const std::vector<CdfKnot>& knots() const { return knots_; }

private:
    friend PiecewiseLinearCdf build_cdf(const Pmf& p);
    std::vector<CdfKnot> knots_;
    bool geometric_ = false;
    double rho_ = 0.0;
};

PiecewiseLinearCdf build_cdf(const Pmf& p);

/// Thresholds and exact masses of the delta-tail and delta-head of a
/// distribution:
///   tail = {y in support : y >= inverse(1 - delta)}        mass > delta
///   head = {y in support : y <= 2 * inverse(1 - delta/2)}  mass > 1 - delta
struct TailHeadReport {
    double delta = 0.0;
    double tail_threshold = 0.0;
    double tail_mass = 0.0;
    double head_threshold = 0.0;
    double head_mass = 0.0;
};

TailHeadReport tail_head(const Pmf& p, double delta);

}  // namespace insurelab
