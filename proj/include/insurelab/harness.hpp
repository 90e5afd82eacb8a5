#pragma once

#include <cstdint>
#include <string>

#include "insurelab/pmf.hpp"
#include "insurelab/rng.hpp"
#include "insurelab/schemes.hpp"

namespace insurelab {

struct WilsonInterval {
    double low = 0.0;
    double high = 1.0;
};

/// Wilson score interval for a binomial proportion.
WilsonInterval wilson(std::uint64_t successes, std::uint64_t trials, double z);

inline constexpr double kZ95 = 1.959963984540054;
inline constexpr double kZ99 = 2.5758293035489004;

/// Monte-Carlo bankruptcy estimate. A path counts as never_entered when the
/// scheme proposed no finite dominant at any length 0..horizon-1. The report
/// is identical for identical (seed, parameters) regardless of worker count:
/// trial t always uses the stream derived from (seed, t) and the aggregates
/// are plain sums.
struct SimReport {
    std::uint64_t trials = 0;
    std::uint64_t horizon = 0;
    std::uint64_t bankruptcies = 0;
    std::uint64_t never_entered = 0;
    double estimate = 0.0;
    double wilson95_low = 0.0;
    double wilson95_high = 1.0;
    std::uint64_t seed = 0;
};

SimReport estimate_bankruptcy(const Pmf& p, const DominationScheme& scheme, std::uint64_t horizon,
                              std::uint64_t trials, std::uint64_t seed, unsigned workers = 0);

/// Exact bankruptcy probability by full path-tree enumeration; requires
/// |support|^horizon <= 10^7. Brute-force oracle for the Monte-Carlo path.
double exact_bankruptcy_small(const Pmf& p, const DominationScheme& scheme, std::uint64_t horizon);

struct LemmaCheckReport {
    std::string lemma;
    std::uint64_t cases_run = 0;
    std::uint64_t violations = 0;
    std::uint64_t vacuous = 0;
    /// min over cases of (bound - checked quantity); negative means violated.
    double worst_margin = 0.0;
    std::string config;
};

/// Random finite pmf: Dirichlet(1) masses over a support of random size
/// (at most max_support_size) drawn without replacement from
/// {0..max_symbol}. All randomized suites draw their inputs through this
/// generator, so a (seed, parameters) pair pins the whole run.
Pmf random_finite_pmf(Rng& rng, std::uint64_t max_support_size = 20,
                      std::uint64_t max_symbol = 999);

/// Divergence sandwich and triangle-like inequality on random pairs and
/// triples:
///   l1^2 / (4 ln2) <= jdist <= l1 / ln2
///   jdist(p,q) + jdist(q,r) >= jdist(p,r)^2 ln2 / 8
LemmaCheckReport check_lemma_dist(std::uint64_t trials, std::uint64_t seed);

/// Empirical-deviation bound: over n i.i.d. draws from p,
///   P(|emp - p|_1 > delta and 2 F_emp^{-1}(1 - delta/6) <= k)
///     <= (2^k - 2) exp(-n delta^2 / 18),
/// checked as: MC estimate minus three standard errors stays below the
/// bound. Configurations with a vacuous bound (>= 1) are skipped.
LemmaCheckReport check_lemma_yeung(const Pmf& p, std::uint64_t n, double delta, std::uint64_t k,
                                   std::uint64_t trials, std::uint64_t seed);

/// Product-measure event transfer: for any R_N with p^N(R_N) >= 1 - alpha
/// and eps = jdist(p, q),
///   q^N(R_N) >= 1 - alpha - 2 N^3 sqrt(4 eps ln2) - 1/N,
/// verified by exact enumeration of all |A|^N strings (requires <= 10^6).
/// R_N is built greedily from the most probable strings plus random padding.
LemmaCheckReport check_lemma_jn(const Pmf& p, const Pmf& q, std::uint64_t n_len, double alpha,
                                std::uint64_t seed);

/// Far-model gap: whenever |p0 - q|_1 <= eps0^2 (ln2)^2 / 16 and
/// jdist(p, p0) >= eps0, then jdist(p, q) >= eps0^2 ln2 / 16. Samples with
/// failing premises are skipped, not counted.
LemmaCheckReport check_lemma_dpq(std::uint64_t trials, std::uint64_t seed);

/// Finite-support l1 concentration: for support size L,
///   P(|emp - p|_1 > t) <= (2^L - 2) exp(-n t^2 / 2),
/// checked as MC estimate minus three standard errors on a nonvacuous grid.
LemmaCheckReport check_lemma_base(std::uint64_t trials, std::uint64_t seed);

}  // namespace insurelab
