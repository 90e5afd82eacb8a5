#include "insurelab/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "insurelab/cdf.hpp"

namespace insurelab {

namespace {
constexpr double kLn2 = 0.6931471805599453;
// Largest loss representable exactly as a double.
constexpr double kLossCap = 9007199254740992.0;  // 2^53
}  // namespace

AttackCertificate attack_allzero(const DominationScheme& scheme, double eta_target,
                                 std::uint64_t scan_budget, std::uint64_t grid) {
    if (!(eta_target > 0.0) || !(eta_target < 1.0))
        throw std::invalid_argument("attack_allzero: eta_target must lie in (0,1)");
    if (grid < 2) throw std::invalid_argument("attack_allzero: grid must be >= 2");

    auto cur = scheme.cursor();
    std::uint64_t entry = 0;
    bool entered = false;
    for (std::uint64_t n = 0; n <= scan_budget; ++n) {
        if (std::isfinite(cur->dominant())) {
            entry = n;
            entered = true;
            break;
        }
        cur->observe(0);
    }
    if (!entered)
        throw AttackError("scheme resists all-zero probe: no entry within scan budget");

    const double delta = 1.0 - eta_target;
    double eps = 0.0;
    for (std::uint64_t k = grid - 1; k >= 1; --k) {
        const double candidate = static_cast<double>(k) / static_cast<double>(grid);
        if (std::pow(1.0 - candidate, static_cast<double>(entry)) > 1.0 - delta / 2.0) {
            eps = candidate;
            break;
        }
    }
    if (eps == 0.0)
        throw AttackError("attack_allzero: no feasible epsilon on the grid");

    auto window_end =
        static_cast<std::uint64_t>(std::ceil(std::log(delta / 2.0) / std::log(1.0 - eps)));
    while (std::pow(1.0 - eps, static_cast<double>(window_end)) >= delta / 2.0) ++window_end;

    // Dominants on 0^i for entry <= i <= window_end; the cursor already sits
    // at length `entry`.
    double max_dominant = 0.0;
    for (std::uint64_t i = entry; i <= window_end; ++i) {
        max_dominant = std::max(max_dominant, cur->dominant());
        cur->observe(0);
    }
    if (!(max_dominant < kLossCap - 1.0))
        throw AttackError("attack_allzero: required loss exceeds the representable range");
    const auto large_loss = static_cast<std::uint64_t>(1.0 + std::ceil(max_dominant));

    AttackCertificate cert;
    cert.eta_target = eta_target;
    cert.entry_length = entry;
    cert.epsilon = eps;
    cert.window_end = window_end;
    cert.large_loss = large_loss;
    cert.analytic_lower_bound = std::pow(1.0 - eps, static_cast<double>(entry)) -
                                std::pow(1.0 - eps, static_cast<double>(window_end));
    cert.grid_resolution = 1.0 / static_cast<double>(grid);
    cert.scan_budget = scan_budget;
    cert.adversarial_p = Pmf::two_point(0, large_loss, 1.0 - eps);

    if (!(std::pow(1.0 - eps, static_cast<double>(entry)) > 1.0 - delta / 2.0) ||
        !(std::pow(1.0 - eps, static_cast<double>(window_end)) < delta / 2.0))
        throw AttackError("attack_allzero: certificate verification failed");
    return cert;
}

double exact_allzero_bankruptcy(const DominationScheme& scheme, const AttackCertificate& cert,
                                std::uint64_t horizon) {
    if (horizon < cert.window_end)
        throw std::domain_error("exact_allzero_bankruptcy: horizon must be >= window_end");
    auto cur = scheme.cursor();
    const double eps = cert.epsilon;
    const double big = static_cast<double>(cert.large_loss);
    double total = 0.0;
    for (std::uint64_t i = 0; i < horizon; ++i) {
        if (cur->dominant() < big)
            total += eps * std::pow(1.0 - eps, static_cast<double>(i));
        cur->observe(0);
    }
    return total;
}

DeceptiveOracle monotone_deceptive_oracle() {
    DeceptiveOracle o;
    o.delta_for_epsilon = [](double eps) { return eps * kLn2 / 8.0; };
    o.make = [](const Pmf& p, double eps, double f) { return monotone_bad_q(p, eps, f); };
    return o;
}

DeceptiveAttackResult attack_deceptive(const DominationScheme& scheme, const Pmf& p,
                                       const DeceptiveOracle& oracle, double alpha, double eta,
                                       const DeceptiveAttackBudget& budget) {
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw std::invalid_argument("attack_deceptive: alpha must lie in (0,1)");
    if (!(eta > 0.0) || !(eta < 1.0))
        throw std::invalid_argument("attack_deceptive: eta must lie in (0,1)");

    // Entry length N with P(entered within N) > 1 - alpha/2, estimated over
    // simulated paths from p.
    std::vector<std::uint64_t> entry_at;  // index n -> #paths entered by n
    entry_at.assign(budget.entry_horizon + 1, 0);
    for (std::uint64_t t = 0; t < budget.entry_trials; ++t) {
        Rng rng = Rng::for_trial(budget.seed, t);
        auto cur = scheme.cursor();
        for (std::uint64_t n = 0; n <= budget.entry_horizon; ++n) {
            if (std::isfinite(cur->dominant())) {
                ++entry_at[n];
                break;
            }
            if (n < budget.entry_horizon) cur->observe(p.sample(rng));
        }
    }
    std::uint64_t entry_len = 0;
    bool found = false;
    std::uint64_t entered_count = 0;
    for (std::uint64_t n = 0; n <= budget.entry_horizon; ++n) {
        entered_count += entry_at[n];
        if (static_cast<double>(entered_count) >
            (1.0 - alpha / 2.0) * static_cast<double>(budget.entry_trials)) {
            entry_len = n;
            found = true;
            break;
        }
    }
    if (!found)
        throw AttackError("attack_deceptive: scheme did not enter often enough within the scan horizon");
    if (entry_len == 0) entry_len = 1;  // the entry length is taken >= 1

    NcsAttackParams params;
    params.alpha = alpha;
    params.eta = eta;
    params.entry_length = entry_len;
    const double n8 = std::pow(static_cast<double>(entry_len), 8.0);
    params.epsilon_budget = 1.0 / (16.0 * kLn2 * n8);
    params.delta = oracle.delta_for_epsilon(params.epsilon_budget);
    params.eta_constraint_ok =
        eta < (1.0 - alpha - 2.0 / static_cast<double>(entry_len)) * (1.0 - 1.0 / std::exp(1.0));
    params.gamma_p =
        1.0 - std::pow(1.0 - alpha / 2.0,
                       1.0 / (static_cast<double>(entry_len) + 1.0 / params.delta));

    // Head of p at gamma_p: symbols up to twice the (1 - gamma_p/2)-quantile.
    const TailHeadReport th = tail_head(p, params.gamma_p);
    std::vector<std::uint64_t> head;
    for (std::size_t i = 0; i < p.table_support().size(); ++i) {
        const std::uint64_t y = p.table_support()[i];
        if (static_cast<double>(y) <= th.head_threshold) head.push_back(y);
    }
    if (head.empty())
        throw AttackError("attack_deceptive: empty head set");

    const double max_len_d =
        static_cast<double>(entry_len) + std::ceil(1.0 / params.delta);
    const auto max_len = static_cast<std::uint64_t>(max_len_d);
    const double log_strings = max_len_d * std::log(static_cast<double>(head.size()));
    const bool exact = log_strings <= std::log(static_cast<double>(budget.enumeration_budget));

    double f_max = 0.0;
    if (exact) {
        // Depth-first enumeration of head-confined strings; every entered
        // prefix of length in [N, max_len] contributes its dominant.
        struct Enumerator {
            const DominationScheme& scheme;
            const std::vector<std::uint64_t>& head;
            std::uint64_t from, to;
            double best = 0.0;

            void walk(SchemeCursor& cur, std::uint64_t depth) {
                const double d = cur.dominant();
                if (depth >= from && std::isfinite(d)) best = std::max(best, d);
                if (depth == to) return;
                for (std::uint64_t y : head) {
                    auto next = cur.clone();
                    next->observe(y);
                    walk(*next, depth + 1);
                }
            }
        };
        Enumerator e{scheme, head, entry_len, max_len, 0.0};
        auto cur = scheme.cursor();
        e.walk(*cur, 0);
        f_max = e.best;
    } else {
        // Sampled lower bound: strings drawn from p conditioned on the head.
        const double head_mass = th.head_mass;
        for (std::uint64_t t = 0; t < budget.enumeration_budget; ++t) {
            Rng rng = Rng::for_trial(budget.seed ^ 0x5eedULL, t);
            auto cur = scheme.cursor();
            for (std::uint64_t n = 0; n < max_len; ++n) {
                std::uint64_t y = p.sample(rng);
                while (static_cast<double>(y) > th.head_threshold && head_mass > 0.0)
                    y = p.sample(rng);
                cur->observe(y);
                const double d = cur->dominant();
                if (n + 1 >= entry_len && std::isfinite(d)) f_max = std::max(f_max, d);
            }
        }
    }
    params.f_values[params.delta] = f_max;

    DeceptiveAttackResult result;
    result.params = params;
    result.f_at_delta = f_max;
    result.f_sampled = !exact;
    result.witness = oracle.make(p, params.epsilon_budget, f_max);
    result.measured = estimate_bankruptcy(result.witness.witness_q, scheme, budget.mc_horizon,
                                          budget.mc_trials, budget.seed);
    return result;
}

}  // namespace insurelab
