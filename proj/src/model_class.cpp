#include "insurelab/model_class.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

#include "insurelab/divergence.hpp"

namespace insurelab {

namespace {

constexpr double kLn2 = 0.6931471805599453;

double geometric_entropy_bits(double rho) {
    return (-rho * std::log2(rho) - (1.0 - rho) * std::log2(1.0 - rho)) / (1.0 - rho);
}

// Largest rho whose geometric entropy stays below h; the entropy is strictly
// increasing in rho.
double max_geometric_rho(double h) {
    double lo = 1e-12, hi = 1.0 - 1e-9;
    if (geometric_entropy_bits(hi) <= h) return hi;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (geometric_entropy_bits(mid) <= h)
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

bool is_uniform_contiguous(const Pmf& p, std::uint64_t max_M) {
    if (p.infinite_support()) return false;
    const auto& s = p.table_support();
    const auto& probs = p.table_probs();
    if (s.back() > max_M) return false;
    const double expected = 1.0 / static_cast<double>(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i > 0 && s[i] != s[i - 1] + 1) return false;
        if (std::abs(probs[i] - expected) > 1e-12) return false;
    }
    return true;
}

}  // namespace

Pmf sample_uniform_class(Rng& rng, std::uint64_t max_M) {
    const std::uint64_t pairs = (max_M + 1) * (max_M + 2) / 2;
    std::uint64_t k = rng.next_below(pairs);
    std::uint64_t M = 0;
    while ((M + 1) * (M + 2) / 2 <= k) ++M;
    const std::uint64_t m = k - M * (M + 1) / 2;
    return Pmf::uniform_range(m, M);
}

Pmf sample_entropy_bounded_monotone(Rng& rng, double h) {
    if (!(h > 0.0)) throw std::domain_error("entropy-bounded sampler: h must be positive");
    const double rho_max = max_geometric_rho(h);
    if (rng.next_unit() < 0.5) {
        const double rho = std::max(1e-9, rng.next_open_unit() * rho_max);
        return Pmf::geometric(rho);
    }
    // Random finite monotone pmf on {0..K}: sorted masses are nonincreasing.
    for (int attempt = 0; attempt < 20; ++attempt) {
        const std::uint64_t k = rng.next_below(9);
        std::vector<double> masses(k + 1);
        double sum = 0.0;
        for (auto& m : masses) {
            m = rng.next_open_unit();
            sum += m;
        }
        std::sort(masses.begin(), masses.end(), std::greater<>());
        for (auto& m : masses) m /= sum;
        std::vector<std::uint64_t> support(k + 1);
        for (std::uint64_t y = 0; y <= k; ++y) support[y] = y;
        Pmf p = Pmf::finite(std::move(support), std::move(masses));
        if (p.entropy_bits() <= h) return p;
    }
    const double rho = std::max(1e-9, rng.next_open_unit() * rho_max);
    return Pmf::geometric(rho);
}

ModelClass uniform_contiguous_class(std::uint64_t max_M) {
    return ModelClass{
        "uniform_contiguous",
        [max_M](Rng& rng) { return sample_uniform_class(rng, max_M); },
        [max_M](const Pmf& p) { return is_uniform_contiguous(p, max_M); },
    };
}

ModelClass monotone_entropy_class(double h) {
    return ModelClass{
        "monotone_entropy",
        [h](Rng& rng) { return sample_entropy_bounded_monotone(rng, h); },
        [h](const Pmf& p) { return p.is_monotone() && p.entropy_bits() <= h + 1e-9; },
    };
}

ModelClass finite_class(std::vector<Pmf> members) {
    auto shared = std::make_shared<std::vector<Pmf>>(std::move(members));
    if (shared->empty()) throw std::invalid_argument("finite class: needs at least one member");
    return ModelClass{
        "finite",
        [shared](Rng& rng) { return (*shared)[rng.next_below(shared->size())]; },
        [shared](const Pmf& p) {
            for (const auto& m : *shared)
                if (jdist(p, m) < 1e-12) return true;
            return false;
        },
    };
}

DeceptionWitness monotone_bad_q(const Pmf& p, double epsilon, double f_value) {
    if (!p.is_monotone()) throw std::invalid_argument("monotone_bad_q: p must be monotone");
    if (!(epsilon > 0.0)) throw std::invalid_argument("monotone_bad_q: epsilon must be positive");
    if (!(f_value >= 0.0)) throw std::invalid_argument("monotone_bad_q: f_value must be nonnegative");

    const double beta = epsilon * kLn2 / 4.0;
    if (!(beta < 1.0)) throw std::invalid_argument("monotone_bad_q: epsilon too large");
    const auto big_k = static_cast<std::uint64_t>(std::ceil(2.0 * (f_value + 1.0)));

    // Mixture of two monotone pmfs; built over the union table. For an
    // unbounded p the table carries all but < 1e-12 of its mass and the
    // mixture is renormalized, which cannot break monotonicity.
    const std::uint64_t top = std::max(big_k, p.table_support().back());
    std::vector<std::uint64_t> support(top + 1);
    std::vector<double> probs(top + 1);
    const double spread = beta / static_cast<double>(big_k + 1);
    double sum = 0.0;
    for (std::uint64_t y = 0; y <= top; ++y) {
        support[y] = y;
        double mass = (1.0 - beta) * p.prob(y);
        if (y <= big_k) mass += spread;
        probs[y] = mass;
        sum += mass;
    }
    for (auto& m : probs) m /= sum;
    Pmf q = Pmf::finite(std::move(support), std::move(probs));

    DeceptionWitness w;
    w.epsilon = epsilon;
    w.delta = beta / 2.0;
    w.f_value = f_value;
    w.dist_achieved = jdist(p, q);
    w.quantile_achieved = build_cdf(q).inverse(1.0 - w.delta);
    w.witness_q = std::move(q);
    if (!(w.dist_achieved < epsilon) || !(w.quantile_achieved > f_value))
        throw std::runtime_error("monotone_bad_q: constructed witness failed verification");
    return w;
}

bool check_witness(const Pmf& p, const DeceptionWitness& w) {
    return jdist(p, w.witness_q) < w.epsilon &&
           build_cdf(w.witness_q).inverse(1.0 - w.delta) > w.f_value;
}

double Centroid::zone_radius() const { return reach * reach * kLn2 * kLn2 / 16.0; }

double Centroid::capture_gap() const {
    const double z = zone_radius();
    return z * z;
}

double Centroid::log2_capture_bound() const { return 2.0 * quantile_bound(zone_radius() / 6.0); }

Quantization quantize_finite_class(const std::vector<Pmf>& members) {
    if (members.empty()) throw std::invalid_argument("quantize: needs at least one member");
    const std::size_t n = members.size();
    std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            d[i][j] = d[j][i] = jdist(members[i], members[j]);
            if (d[i][j] < 1e-15)
                throw std::domain_error("quantize: members must be pairwise distinct");
        }

    auto cdfs = std::make_shared<std::vector<PiecewiseLinearCdf>>();
    cdfs->reserve(n);
    for (const auto& m : members) cdfs->push_back(build_cdf(m));

    Quantization q;
    q.centroids.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        double closest = 2.0;
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) closest = std::min(closest, d[i][j]);
        const double reach = std::min(0.5 * closest, 1.0);

        auto ball = std::make_shared<std::vector<std::size_t>>();
        for (std::size_t j = 0; j < n; ++j)
            if (d[i][j] < reach) ball->push_back(j);

        Centroid c;
        c.index = static_cast<std::uint32_t>(i + 1);
        c.center = members[i];
        c.reach = reach;
        c.quantile_bound = [cdfs, ball](double delta) {
            double g = 0.0;
            for (std::size_t j : *ball) g = std::max(g, (*cdfs)[j].inverse(1.0 - delta));
            return g;
        };
        q.centroids.push_back(std::move(c));
    }
    return q;
}

}  // namespace insurelab
