#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>

#include "insurelab/harness.hpp"
#include "insurelab/model_class.hpp"
#include "insurelab/pmf.hpp"
#include "insurelab/schemes.hpp"

namespace insurelab {

class AttackError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parameters of an all-zeros bankruptcy attack against a deterministic
/// scheme: the scheme enters after entry_length zeros, the adversary places
/// mass epsilon on a loss large_loss that exceeds every dominant the scheme
/// proposes on 0^i for entry_length <= i <= window_end, and the analytic
/// bound (1-eps)^N - (1-eps)^M lower-bounds the bankruptcy probability.
struct AttackCertificate {
    Pmf adversarial_p;
    double eta_target = 0.0;
    std::uint64_t entry_length = 0;  // N
    double epsilon = 0.0;
    std::uint64_t window_end = 0;  // M
    std::uint64_t large_loss = 0;  // L
    double analytic_lower_bound = 0.0;
    double grid_resolution = 0.0;
    std::uint64_t scan_budget = 0;

    bool meets_target() const { return analytic_lower_bound >= eta_target; }
};

/// Probes the scheme on the all-zero sequence and builds a certificate.
/// Throws AttackError when the scheme never enters within the scan budget or
/// when no grid epsilon is feasible; a certificate whose bound falls short of
/// the target is returned rather than thrown (meets_target() tells).
AttackCertificate attack_allzero(const DominationScheme& scheme, double eta_target,
                                 std::uint64_t scan_budget = 1'000'000,
                                 std::uint64_t grid = 1000);

/// Exact probability that the scheme goes bankrupt within `horizon` steps
/// under the certificate's two-point distribution, summed over the
/// prefix-free family {0^i L : first large loss at step i+1}. Exact for
/// schemes whose dominants never drop below an already observed loss, which
/// holds for every scheme built here.
double exact_allzero_bankruptcy(const DominationScheme& scheme, const AttackCertificate& cert,
                                std::uint64_t horizon);

/// Derived parameters of a deceptive-model attack.
struct NcsAttackParams {
    double alpha = 0.0;
    double eta = 0.0;
    double epsilon_budget = 0.0;  // 1 / (16 ln2 N^8)
    double gamma_p = 0.0;         // (1-gamma)^(N+1/delta) >= 1 - alpha/2
    double delta = 0.0;
    std::uint64_t entry_length = 0;  // N
    bool eta_constraint_ok = false;  // eta < (1 - alpha - 2/N)(1 - 1/e)
    std::map<double, double> f_values;
};

/// Supplies deception witnesses: delta_for_epsilon tells which quantile
/// level a witness built at a given epsilon certifies, make builds and
/// verifies the witness.
struct DeceptiveOracle {
    std::function<double(double)> delta_for_epsilon;
    std::function<DeceptionWitness(const Pmf&, double, double)> make;
};

/// Oracle backed by monotone_bad_q (delta = epsilon ln2 / 8).
DeceptiveOracle monotone_deceptive_oracle();

struct DeceptiveAttackBudget {
    std::uint64_t entry_trials = 2000;
    std::uint64_t entry_horizon = 10'000;
    std::uint64_t enumeration_budget = 1'000'000;
    std::uint64_t mc_trials = 2000;
    std::uint64_t mc_horizon = 100'000;
    std::uint64_t seed = 1;
};

struct DeceptiveAttackResult {
    NcsAttackParams params;
    double f_at_delta = 0.0;
    bool f_sampled = false;  // true when f is a sampled lower bound
    DeceptionWitness witness;
    SimReport measured;
};

/// Desk-scale attack against a scheme around a model p: estimates the entry
/// length N, derives (epsilon, gamma_p, delta), maximizes the dominant over
/// entered strings confined to the gamma_p-head of p (exactly when the
/// string space fits the enumeration budget, otherwise over sampled strings,
/// flagged), asks the oracle for a witness q, and measures the scheme's
/// bankruptcy rate under q.
DeceptiveAttackResult attack_deceptive(const DominationScheme& scheme, const Pmf& p,
                                       const DeceptiveOracle& oracle, double alpha, double eta,
                                       const DeceptiveAttackBudget& budget);

}  // namespace insurelab
