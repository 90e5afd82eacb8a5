#include "insurelab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <vector>

#include "insurelab/cdf.hpp"
#include "insurelab/divergence.hpp"

namespace insurelab {

namespace {
constexpr double kLn2 = 0.6931471805599453;
}

WilsonInterval wilson(std::uint64_t successes, std::uint64_t trials, double z) {
    if (trials == 0) return {0.0, 1.0};
    const double n = static_cast<double>(trials);
    const double phat = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (phat + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
    WilsonInterval w{std::max(0.0, center - half), std::min(1.0, center + half)};
    if (successes == 0) w.low = 0.0;
    if (successes == trials) w.high = 1.0;
    return w;
}

SimReport estimate_bankruptcy(const Pmf& p, const DominationScheme& scheme, std::uint64_t horizon,
                              std::uint64_t trials, std::uint64_t seed, unsigned workers) {
    if (horizon < 1 || trials < 1)
        throw std::invalid_argument("estimate_bankruptcy: horizon and trials must be >= 1");
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, trials));

    struct Tally {
        std::uint64_t bankrupt = 0;
        std::uint64_t never_entered = 0;
    };
    std::vector<Tally> tallies(workers);

    auto run_range = [&](std::uint64_t lo, std::uint64_t hi, Tally& out) {
        for (std::uint64_t t = lo; t < hi; ++t) {
            Rng rng = Rng::for_trial(seed, t);
            auto cur = scheme.cursor();
            bool entered = false;
            bool bankrupt = false;
            for (std::uint64_t step = 0; step < horizon; ++step) {
                const double d = cur->dominant();
                if (std::isfinite(d)) entered = true;
                const std::uint64_t y = p.sample(rng);
                if (d < static_cast<double>(y)) {
                    bankrupt = true;
                    break;
                }
                cur->observe(y);
            }
            if (bankrupt) ++out.bankrupt;
            if (!entered) ++out.never_entered;
        }
    };

    if (workers == 1) {
        run_range(0, trials, tallies[0]);
    } else {
        std::vector<std::thread> threads;
        const std::uint64_t chunk = (trials + workers - 1) / workers;
        for (unsigned w = 0; w < workers; ++w) {
            const std::uint64_t lo = w * chunk;
            const std::uint64_t hi = std::min<std::uint64_t>(trials, lo + chunk);
            if (lo >= hi) break;
            threads.emplace_back(run_range, lo, hi, std::ref(tallies[w]));
        }
        for (auto& th : threads) th.join();
    }

    SimReport r;
    r.trials = trials;
    r.horizon = horizon;
    r.seed = seed;
    for (const auto& t : tallies) {
        r.bankruptcies += t.bankrupt;
        r.never_entered += t.never_entered;
    }
    r.estimate = static_cast<double>(r.bankruptcies) / static_cast<double>(trials);
    const WilsonInterval w95 = wilson(r.bankruptcies, trials, kZ95);
    r.wilson95_low = w95.low;
    r.wilson95_high = w95.high;
    return r;
}

double exact_bankruptcy_small(const Pmf& p, const DominationScheme& scheme,
                              std::uint64_t horizon) {
    if (p.infinite_support())
        throw std::invalid_argument("exact_bankruptcy_small: needs a finite-support pmf");
    const auto& support = p.table_support();
    const auto& probs = p.table_probs();
    const double leaves = std::pow(static_cast<double>(support.size()),
                                   static_cast<double>(horizon));
    if (leaves > 1e7)
        throw std::invalid_argument("exact_bankruptcy_small: |support|^horizon exceeds 1e7");

    // Depth-first over the full path tree, pruning at bankruptcies.
    struct Walker {
        const std::vector<std::uint64_t>& support;
        const std::vector<double>& probs;
        std::uint64_t horizon;

        double walk(const SchemeCursor& cur, std::uint64_t depth, double prob) const {
            if (depth == horizon) return 0.0;
            const double d = cur.dominant();
            double total = 0.0;
            for (std::size_t i = 0; i < support.size(); ++i) {
                if (d < static_cast<double>(support[i])) {
                    total += prob * probs[i];
                } else {
                    auto next = cur.clone();
                    next->observe(support[i]);
                    total += walk(*next, depth + 1, prob * probs[i]);
                }
            }
            return total;
        }
    };
    Walker w{support, probs, horizon};
    return w.walk(*scheme.cursor(), 0, 1.0);
}

Pmf random_finite_pmf(Rng& rng, std::uint64_t max_support_size, std::uint64_t max_symbol) {
    const std::uint64_t k = 1 + rng.next_below(max_support_size);
    std::set<std::uint64_t> symbols;
    while (symbols.size() < k) symbols.insert(rng.next_below(max_symbol + 1));
    std::vector<std::uint64_t> support(symbols.begin(), symbols.end());
    std::vector<double> masses(support.size());
    double sum = 0.0;
    for (auto& m : masses) {
        m = -std::log1p(-rng.next_open_unit());
        if (m <= 0.0) m = 1e-300;
        sum += m;
    }
    for (auto& m : masses) m /= sum;
    return Pmf::finite(std::move(support), std::move(masses));
}

LemmaCheckReport check_lemma_dist(std::uint64_t trials, std::uint64_t seed) {
    Rng rng(seed);
    LemmaCheckReport r;
    r.lemma = "dist";
    r.worst_margin = std::numeric_limits<double>::infinity();
    const double tol = 1e-9;

    auto account = [&](double margin) {
        r.worst_margin = std::min(r.worst_margin, margin);
        if (margin < -tol) ++r.violations;
    };

    for (std::uint64_t t = 0; t < trials; ++t) {
        const Pmf p = random_finite_pmf(rng);
        const Pmf q = random_finite_pmf(rng);
        const double j = jdist(p, q);
        const double l1 = l1_dist(p, q);
        account(j - l1 * l1 / (4.0 * kLn2));
        account(l1 / kLn2 - j);
        ++r.cases_run;
    }
    for (std::uint64_t t = 0; t < trials; ++t) {
        const Pmf p = random_finite_pmf(rng);
        const Pmf q = random_finite_pmf(rng);
        const Pmf s = random_finite_pmf(rng);
        const double pr = jdist(p, s);
        account(jdist(p, q) + jdist(q, s) - pr * pr * kLn2 / 8.0);
        ++r.cases_run;
    }
    std::ostringstream cfg;
    cfg << "trials=" << trials << ";seed=" << seed << ";tol=" << tol;
    r.config = cfg.str();
    return r;
}

namespace {

// l1 distance between the empirical counts and p.
double counts_l1(const std::map<std::uint64_t, std::uint64_t>& counts, std::uint64_t n,
                 const Pmf& p) {
    double sum = 0.0;
    double matched = 0.0;
    for (const auto& [y, c] : counts) {
        const double e = static_cast<double>(c) / static_cast<double>(n);
        const double m = p.prob(y);
        sum += std::abs(e - m);
        matched += m;
    }
    return sum + std::max(0.0, 1.0 - matched);
}

}  // namespace

LemmaCheckReport check_lemma_yeung(const Pmf& p, std::uint64_t n, double delta, std::uint64_t k,
                                   std::uint64_t trials, std::uint64_t seed) {
    if (k < 2) throw std::invalid_argument("lemma yeung: k must be >= 2");
    if (!(delta > 0.0)) throw std::invalid_argument("lemma yeung: delta must be positive");
    LemmaCheckReport r;
    r.lemma = "yeung";
    std::ostringstream cfg;
    cfg << "n=" << n << ";delta=" << delta << ";k=" << k << ";trials=" << trials
        << ";seed=" << seed;
    r.config = cfg.str();

    const double rhs =
        (std::exp2(static_cast<double>(k)) - 2.0) * std::exp(-static_cast<double>(n) * delta * delta / 18.0);
    if (rhs >= 1.0) {
        r.vacuous = 1;
        r.worst_margin = 0.0;
        r.config += ";skipped=vacuous";
        return r;
    }

    Rng rng(seed);
    std::uint64_t hits = 0;
    for (std::uint64_t t = 0; t < trials; ++t) {
        std::map<std::uint64_t, std::uint64_t> counts;
        for (std::uint64_t i = 0; i < n; ++i) ++counts[p.sample(rng)];
        if (counts_l1(counts, n, p) > delta) {
            std::vector<std::uint64_t> support;
            std::vector<std::uint64_t> cnts;
            support.reserve(counts.size());
            cnts.reserve(counts.size());
            for (const auto& [y, c] : counts) {
                support.push_back(y);
                cnts.push_back(c);
            }
            EmpiricalType type{std::move(support), std::move(cnts), n};
            const double q = build_cdf(type.to_pmf()).inverse(1.0 - delta / 6.0);
            if (2.0 * q <= static_cast<double>(k)) ++hits;
        }
    }
    r.cases_run = 1;
    const double est = static_cast<double>(hits) / static_cast<double>(trials);
    const double stderr_ = std::sqrt(est * (1.0 - est) / static_cast<double>(trials));
    r.worst_margin = rhs - (est - 3.0 * stderr_);
    if (r.worst_margin < 0.0) ++r.violations;
    return r;
}

LemmaCheckReport check_lemma_jn(const Pmf& p, const Pmf& q, std::uint64_t n_len, double alpha,
                                std::uint64_t seed) {
    if (p.infinite_support() || q.infinite_support())
        throw std::invalid_argument("lemma jn: exact enumeration needs finite supports");
    std::vector<std::uint64_t> alphabet;
    {
        std::set<std::uint64_t> u(p.table_support().begin(), p.table_support().end());
        u.insert(q.table_support().begin(), q.table_support().end());
        alphabet.assign(u.begin(), u.end());
    }
    const double strings = std::pow(static_cast<double>(alphabet.size()),
                                    static_cast<double>(n_len));
    if (strings > 1e6) throw std::invalid_argument("lemma jn: |A|^N exceeds 1e6");

    LemmaCheckReport r;
    r.lemma = "jn";
    std::ostringstream cfg;
    cfg << "N=" << n_len << ";alpha=" << alpha << ";|A|=" << alphabet.size() << ";seed=" << seed;
    r.config = cfg.str();

    const double eps = jdist(p, q);
    const double rhs = 1.0 - alpha -
                       2.0 * std::pow(static_cast<double>(n_len), 3.0) * std::sqrt(4.0 * eps * kLn2) -
                       1.0 / static_cast<double>(n_len);
    if (rhs < 0.0) {
        r.vacuous = 1;
        r.config += ";skipped=vacuous";
        return r;
    }

    const auto count = static_cast<std::uint64_t>(strings);
    std::vector<double> pprob(count), qprob(count);
    for (std::uint64_t idx = 0; idx < count; ++idx) {
        double pp = 1.0, qq = 1.0;
        std::uint64_t rest = idx;
        for (std::uint64_t pos = 0; pos < n_len; ++pos) {
            const std::uint64_t sym = alphabet[rest % alphabet.size()];
            rest /= alphabet.size();
            pp *= p.prob(sym);
            qq *= q.prob(sym);
        }
        pprob[idx] = pp;
        qprob[idx] = qq;
    }

    // Greedy high-probability event plus random padding.
    std::vector<std::uint64_t> order(count);
    for (std::uint64_t i = 0; i < count; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::uint64_t a, std::uint64_t b) { return pprob[a] > pprob[b]; });
    std::vector<bool> in_event(count, false);
    double pmass = 0.0;
    for (std::uint64_t i = 0; i < count && pmass < 1.0 - alpha; ++i) {
        in_event[order[i]] = true;
        pmass += pprob[order[i]];
    }
    Rng rng(seed);
    for (int pad = 0; pad < 3; ++pad) in_event[rng.next_below(count)] = true;

    double qmass = 0.0;
    for (std::uint64_t i = 0; i < count; ++i)
        if (in_event[i]) qmass += qprob[i];

    r.cases_run = 1;
    r.worst_margin = qmass - rhs;
    if (r.worst_margin < -1e-12) ++r.violations;
    return r;
}

LemmaCheckReport check_lemma_dpq(std::uint64_t trials, std::uint64_t seed) {
    Rng rng(seed);
    LemmaCheckReport r;
    r.lemma = "dpq";
    r.worst_margin = std::numeric_limits<double>::infinity();
    std::ostringstream cfg;
    cfg << "trials=" << trials << ";seed=" << seed;
    r.config = cfg.str();

    for (std::uint64_t t = 0; t < trials; ++t) {
        const Pmf p0 = random_finite_pmf(rng);
        const Pmf p = random_finite_pmf(rng);
        const double eps0 = jdist(p, p0);
        if (eps0 < 1e-9) {
            ++r.vacuous;
            continue;
        }
        // q within the allowed l1 shell around p0; q = p0 itself sits on the
        // premise boundary and is exercised every tenth case.
        Pmf q = p0;
        if (t % 10 != 0) {
            const Pmf noise = random_finite_pmf(rng);
            const double budget = eps0 * eps0 * kLn2 * kLn2 / 16.0;
            const double w = std::min(0.5, budget / 2.0);
            std::set<std::uint64_t> u(p0.table_support().begin(), p0.table_support().end());
            u.insert(noise.table_support().begin(), noise.table_support().end());
            std::vector<std::uint64_t> support(u.begin(), u.end());
            std::vector<double> masses;
            masses.reserve(support.size());
            double sum = 0.0;
            for (std::uint64_t y : support) {
                const double m = (1.0 - w) * p0.prob(y) + w * noise.prob(y);
                masses.push_back(m);
                sum += m;
            }
            for (auto& m : masses) m /= sum;
            std::vector<std::uint64_t> kept_support;
            std::vector<double> kept;
            for (std::size_t i = 0; i < masses.size(); ++i)
                if (masses[i] > 0.0) {
                    kept_support.push_back(support[i]);
                    kept.push_back(masses[i]);
                }
            q = Pmf::finite(std::move(kept_support), std::move(kept));
            if (l1_dist(p0, q) > eps0 * eps0 * kLn2 * kLn2 / 16.0) {
                ++r.vacuous;  // premise failed, sample inadmissible
                continue;
            }
        }
        const double margin = jdist(p, q) - eps0 * eps0 * kLn2 / 16.0;
        r.worst_margin = std::min(r.worst_margin, margin);
        if (margin < -1e-9) ++r.violations;
        ++r.cases_run;
    }
    return r;
}

LemmaCheckReport check_lemma_base(std::uint64_t trials, std::uint64_t seed) {
    LemmaCheckReport r;
    r.lemma = "base";
    r.worst_margin = std::numeric_limits<double>::infinity();
    std::ostringstream cfg;
    cfg << "trials=" << trials << ";seed=" << seed;
    r.config = cfg.str();

    struct Config {
        Pmf p;
        std::uint64_t n;
        double t;
    };
    Rng seeder(seed);
    const std::vector<Config> grid = {
        {Pmf::uniform_range(0, 3), 400, 0.35},
        {Pmf::uniform_range(0, 5), 600, 0.35},
        {Pmf::two_point(0, 7, 0.8), 500, 0.30},
        {Pmf::finite({0, 1, 2}, {0.6, 0.3, 0.1}), 800, 0.25},
        {random_finite_pmf(seeder, 5, 50), 700, 0.35},
        {random_finite_pmf(seeder, 6, 200), 900, 0.35},
    };

    std::uint64_t config_index = 0;
    for (const auto& c : grid) {
        ++config_index;
        const double L = static_cast<double>(c.p.table_support().size());
        const double rhs = (std::exp2(L) - 2.0) *
                           std::exp(-static_cast<double>(c.n) * c.t * c.t / 2.0);
        if (rhs >= 1.0) {
            ++r.vacuous;
            continue;
        }
        Rng rng = Rng::for_trial(seed, config_index);
        std::uint64_t hits = 0;
        for (std::uint64_t trial = 0; trial < trials; ++trial) {
            std::map<std::uint64_t, std::uint64_t> counts;
            for (std::uint64_t i = 0; i < c.n; ++i) ++counts[c.p.sample(rng)];
            if (counts_l1(counts, c.n, c.p) > c.t) ++hits;
        }
        const double est = static_cast<double>(hits) / static_cast<double>(trials);
        const double stderr_ = std::sqrt(est * (1.0 - est) / static_cast<double>(trials));
        const double margin = rhs + 3.0 * stderr_ - est;
        r.worst_margin = std::min(r.worst_margin, margin);
        if (margin < 0.0) ++r.violations;
        ++r.cases_run;
    }
    return r;
}

}  // namespace insurelab
