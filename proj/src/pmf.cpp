#include "insurelab/pmf.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace insurelab {

namespace {
constexpr double kMassTol = 1e-12;
}

void Pmf::build_sums() {
    cum_.resize(probs_.size());
    tail_.resize(probs_.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < probs_.size(); ++i) {
        acc += probs_[i];
        cum_[i] = acc;
    }
    acc = 0.0;
    for (std::size_t i = probs_.size(); i-- > 0;) {
        acc += probs_[i];
        tail_[i] = acc;
    }
}

Pmf Pmf::finite(std::vector<std::uint64_t> support, std::vector<double> probs) {
    if (support.empty() || support.size() != probs.size())
        throw std::invalid_argument("pmf: support and probs must be non-empty and of equal size");
    for (std::size_t i = 0; i < support.size(); ++i) {
        if (i > 0 && support[i] <= support[i - 1])
            throw std::invalid_argument("pmf: support must be strictly increasing");
        if (!(probs[i] > 0.0) || !std::isfinite(probs[i]))
            throw std::invalid_argument("pmf: every stored probability must be positive and finite");
    }
    double sum = 0.0;
    for (double p : probs) sum += p;
    if (std::abs(sum - 1.0) > kMassTol)
        throw std::invalid_argument("pmf: probabilities must sum to 1 within 1e-12");

    Pmf p;
    p.kind_ = Kind::Finite;
    p.support_ = std::move(support);
    p.probs_ = std::move(probs);
    p.build_sums();
    return p;
}

Pmf Pmf::point_mass(std::uint64_t y) { return finite({y}, {1.0}); }

Pmf Pmf::uniform_range(std::uint64_t lo, std::uint64_t hi) {
    if (hi < lo) throw std::invalid_argument("pmf: uniform range needs lo <= hi");
    const std::uint64_t n = hi - lo + 1;
    std::vector<std::uint64_t> support(n);
    std::vector<double> probs(n, 1.0 / static_cast<double>(n));
    for (std::uint64_t i = 0; i < n; ++i) support[i] = lo + i;
    return finite(std::move(support), std::move(probs));
}

Pmf Pmf::geometric(double rho) {
    if (!(rho > 0.0) || !(rho < 1.0))
        throw std::invalid_argument("pmf: geometric parameter must lie in (0,1)");
    Pmf p;
    p.kind_ = Kind::Geometric;
    p.rho_ = rho;
    // Table truncated at the smallest y with cumulative mass >= 1 - 1e-12.
    const auto last = static_cast<std::uint64_t>(
        std::max(0.0, std::ceil(std::log(kMassTol) / std::log(rho)) - 1.0));
    std::vector<std::uint64_t> support(last + 1);
    std::vector<double> probs(last + 1);
    double mass = 1.0 - rho;
    for (std::uint64_t y = 0; y <= last; ++y) {
        support[y] = y;
        probs[y] = mass;
        mass *= rho;
    }
    p.support_ = std::move(support);
    p.probs_ = std::move(probs);
    p.build_sums();
    return p;
}

Pmf Pmf::two_point(std::uint64_t a, std::uint64_t b, double weight_a) {
    if (a == b) throw std::invalid_argument("pmf: two_point needs distinct atoms");
    if (!(weight_a > 0.0) || !(weight_a < 1.0))
        throw std::invalid_argument("pmf: two_point weight must lie in (0,1)");
    if (a > b) {
        std::swap(a, b);
        weight_a = 1.0 - weight_a;
    }
    Pmf p;
    p.kind_ = Kind::TwoPoint;
    p.a_ = a;
    p.b_ = b;
    p.weight_a_ = weight_a;
    p.support_ = {a, b};
    p.probs_ = {weight_a, 1.0 - weight_a};
    p.build_sums();
    return p;
}

double Pmf::prob(std::uint64_t y) const {
    if (kind_ == Kind::Geometric) return (1.0 - rho_) * std::pow(rho_, static_cast<double>(y));
    auto it = std::lower_bound(support_.begin(), support_.end(), y);
    if (it == support_.end() || *it != y) return 0.0;
    return probs_[static_cast<std::size_t>(it - support_.begin())];
}

double Pmf::cum(std::uint64_t y) const {
    if (kind_ == Kind::Geometric) return 1.0 - std::pow(rho_, static_cast<double>(y) + 1.0);
    auto it = std::upper_bound(support_.begin(), support_.end(), y);
    if (it == support_.begin()) return 0.0;
    return cum_[static_cast<std::size_t>(it - support_.begin()) - 1];
}

double Pmf::tail_from(std::uint64_t y) const {
    if (kind_ == Kind::Geometric) return std::pow(rho_, static_cast<double>(y));
    auto it = std::lower_bound(support_.begin(), support_.end(), y);
    if (it == support_.end()) return 0.0;
    return tail_[static_cast<std::size_t>(it - support_.begin())];
}

std::uint64_t Pmf::min_support() const { return support_.front(); }

std::uint64_t Pmf::max_support() const {
    if (kind_ == Kind::Geometric)
        throw std::logic_error("pmf: geometric support is unbounded");
    return support_.back();
}

double Pmf::geometric_rho() const {
    if (kind_ != Kind::Geometric) throw std::logic_error("pmf: not geometric");
    return rho_;
}

std::uint64_t Pmf::two_point_a() const {
    if (kind_ != Kind::TwoPoint) throw std::logic_error("pmf: not two_point");
    return a_;
}

std::uint64_t Pmf::two_point_b() const {
    if (kind_ != Kind::TwoPoint) throw std::logic_error("pmf: not two_point");
    return b_;
}

double Pmf::two_point_weight_a() const {
    if (kind_ != Kind::TwoPoint) throw std::logic_error("pmf: not two_point");
    return weight_a_;
}

double Pmf::mean() const {
    if (kind_ == Kind::Geometric) return rho_ / (1.0 - rho_);
    double m = 0.0;
    for (std::size_t i = 0; i < support_.size(); ++i)
        m += static_cast<double>(support_[i]) * probs_[i];
    return m;
}

double Pmf::entropy_bits() const {
    if (kind_ == Kind::Geometric) {
        const double hb = -rho_ * std::log2(rho_) - (1.0 - rho_) * std::log2(1.0 - rho_);
        return hb / (1.0 - rho_);
    }
    double h = 0.0;
    for (double p : probs_) h -= p * std::log2(p);
    return h;
}

bool Pmf::is_monotone() const {
    if (kind_ == Kind::Geometric) return true;
    // Off-support symbols carry mass 0, so monotonicity forces a contiguous
    // support starting at 0 with nonincreasing masses.
    if (support_.front() != 0) return false;
    for (std::size_t i = 0; i < support_.size(); ++i) {
        if (support_[i] != i) return false;
        if (i > 0 && probs_[i] > probs_[i - 1]) return false;
    }
    return true;
}

std::uint64_t Pmf::sample(Rng& rng) const {
    const double u = rng.next_unit();
    if (kind_ == Kind::Geometric) {
        if (u <= 0.0) return 0;
        const double t = std::log1p(-u) / std::log(rho_);
        double y = std::floor(t);
        if (y < 0.0) y = 0.0;
        return static_cast<std::uint64_t>(y);
    }
    auto it = std::lower_bound(cum_.begin(), cum_.end(), u);
    if (it == cum_.end()) return support_.back();
    return support_[static_cast<std::size_t>(it - cum_.begin())];
}

bool Pmf::same_table(const Pmf& other, double tol) const {
    if (support_ != other.support_) return false;
    for (std::size_t i = 0; i < probs_.size(); ++i)
        if (std::abs(probs_[i] - other.probs_[i]) > tol) return false;
    return true;
}

EmpiricalType empirical_type(const std::vector<std::uint64_t>& losses) {
    if (losses.empty()) throw std::domain_error("empirical: sequence must be non-empty");
    std::map<std::uint64_t, std::uint64_t> counts;
    for (std::uint64_t y : losses) ++counts[y];
    EmpiricalType t;
    t.total = losses.size();
    t.support.reserve(counts.size());
    t.counts.reserve(counts.size());
    for (const auto& [y, c] : counts) {
        t.support.push_back(y);
        t.counts.push_back(c);
    }
    return t;
}

Pmf EmpiricalType::to_pmf() const {
    std::vector<double> probs(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i)
        probs[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
    return Pmf::finite(support, std::move(probs));
}

Pmf empirical(const std::vector<std::uint64_t>& losses) { return empirical_type(losses).to_pmf(); }

}  // namespace insurelab
