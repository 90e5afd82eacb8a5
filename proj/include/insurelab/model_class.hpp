#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "insurelab/cdf.hpp"
#include "insurelab/pmf.hpp"
#include "insurelab/rng.hpp"

namespace insurelab {

/// A family of loss distributions together with a sampler and the membership
/// predicate the sampler must respect.
struct ModelClass {
    std::string name;
    std::function<Pmf(Rng&)> sample;
    std::function<bool(const Pmf&)> contains;
};

/// Uniform distribution on a contiguous range {m..M}, with (m, M) drawn
/// uniformly over all pairs 0 <= m <= M <= max_M.
Pmf sample_uniform_class(Rng& rng, std::uint64_t max_M);

/// A monotone distribution with Shannon entropy at most h bits. Draws either
/// a geometric member whose parameter is confined to the entropy-feasible
/// interval, or a random finite monotone pmf accepted only under the entropy
/// bound.
Pmf sample_entropy_bounded_monotone(Rng& rng, double h);

ModelClass uniform_contiguous_class(std::uint64_t max_M);
ModelClass monotone_entropy_class(double h);
ModelClass finite_class(std::vector<Pmf> members);

/// A nearby distribution with an arbitrarily large quantile: q is close to p
/// in divergence yet its (1 - delta)-quantile exceeds f_value.
struct DeceptionWitness {
    double epsilon = 0.0;
    double delta = 0.0;
    double f_value = 0.0;
    Pmf witness_q;
    double dist_achieved = 0.0;
    double quantile_achieved = 0.0;
};

/// For a monotone p, returns q = (1-beta) p + beta uniform{0..K} with
/// beta = epsilon ln2 / 4 and K = ceil(2 (f_value + 1)); q stays monotone.
/// The returned witness is re-verified by direct computation of the
/// divergence and the quantile; failure throws, it is never returned.
DeceptionWitness monotone_bad_q(const Pmf& p, double epsilon, double f_value);

bool check_witness(const Pmf& p, const DeceptionWitness& w);

/// One cell of a quantization: an indexed center with its reach and a
/// nonincreasing quantile bound g(delta) valid on the whole reach-ball.
struct Centroid {
    std::uint32_t index = 0;
    Pmf center;
    double reach = 0.0;
    std::function<double(double)> quantile_bound;

    /// l1 radius of the zone used to capture empirical types.
    double zone_radius() const;
    /// Squared zone radius; lower-bounds the squared l1 gap between an
    /// empirical type captured here and a model outside the reach.
    double capture_gap() const;
    /// log2 of the capture bound 2^(2 g(zone_radius/6)).
    double log2_capture_bound() const;
};

struct Quantization {
    std::vector<Centroid> centroids;
};

/// One centroid per member, indexed in order. The reach is half the minimum
/// divergence to any other member (capped at 1), so every reach-ball can be
/// listed exactly and g is a finite maximum of member quantiles.
Quantization quantize_finite_class(const std::vector<Pmf>& members);

}  // namespace insurelab
