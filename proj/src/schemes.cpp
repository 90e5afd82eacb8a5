#include "insurelab/schemes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "insurelab/cdf.hpp"

namespace insurelab {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint64_t kNoEntry = std::numeric_limits<std::uint64_t>::max();
constexpr std::uint64_t kEntryScanCap = 50'000'000;
}  // namespace

History::History(std::vector<std::uint64_t> losses) {
    for (std::uint64_t y : losses) push(y);
}

void History::push(std::uint64_t loss) {
    losses_.push_back(loss);
    max_ = std::max(max_, loss);
    ++counts_[loss];
}

double DominationScheme::dominant(const History& h) const { return dominant(h.losses()); }

double DominationScheme::dominant(std::span<const std::uint64_t> losses) const {
    auto c = cursor();
    for (std::uint64_t y : losses) c->observe(y);
    return c->dominant();
}

// ---------------------------------------------------------------------------
// Doubling
// ---------------------------------------------------------------------------

namespace {

class DoublingCursor final : public SchemeCursor {
public:
    DoublingCursor(double threshold) : threshold_(threshold) {}
    double dominant() const override {
        if (static_cast<double>(n_) <= threshold_) return kInf;
        return 2.0 * static_cast<double>(max_);
    }
    void observe(std::uint64_t loss) override {
        ++n_;
        max_ = std::max(max_, loss);
    }
    std::unique_ptr<SchemeCursor> clone() const override {
        return std::make_unique<DoublingCursor>(*this);
    }

private:
    double threshold_;
    std::uint64_t n_ = 0;
    std::uint64_t max_ = 0;
};

}  // namespace

DoublingScheme::DoublingScheme(double eta) : eta_(eta) {
    if (!(eta > 0.0) || !(eta < 1.0))
        throw std::invalid_argument("doubling scheme: eta must lie in (0,1)");
    entry_threshold_ = std::log2(1.0 / eta) + 1.0;
}

std::unique_ptr<SchemeCursor> DoublingScheme::cursor() const {
    return std::make_unique<DoublingCursor>(entry_threshold_);
}

std::shared_ptr<DoublingScheme> doubling_scheme(double eta) {
    return std::make_shared<DoublingScheme>(eta);
}

// ---------------------------------------------------------------------------
// Entropy bound
// ---------------------------------------------------------------------------

namespace {

class EntropyCursor final : public SchemeCursor {
public:
    EntropyCursor(double h, double eta) : h_(h), eta_(eta) {}
    double dominant() const override {
        const double n = static_cast<double>(n_);
        const double exponent = 1.0 + 2.0 * h_ * (n + 1.0) * (n + 2.0) / eta_;
        // Finite by construction; saturate instead of overflowing to inf.
        if (exponent >= 1024.0) return std::numeric_limits<double>::max();
        return std::exp2(exponent);
    }
    void observe(std::uint64_t) override { ++n_; }
    std::unique_ptr<SchemeCursor> clone() const override {
        return std::make_unique<EntropyCursor>(*this);
    }

private:
    double h_;
    double eta_;
    std::uint64_t n_ = 0;
};

}  // namespace

EntropyScheme::EntropyScheme(double h, double eta) : h_(h), eta_(eta) {
    if (!(h > 0.0)) throw std::invalid_argument("entropy scheme: h must be positive");
    if (!(eta > 0.0) || !(eta < 1.0))
        throw std::invalid_argument("entropy scheme: eta must lie in (0,1)");
}

std::unique_ptr<SchemeCursor> EntropyScheme::cursor() const {
    return std::make_unique<EntropyCursor>(h_, eta_);
}

std::shared_ptr<EntropyScheme> entropy_scheme(double h, double eta) {
    return std::make_shared<EntropyScheme>(h, eta);
}

// ---------------------------------------------------------------------------
// Generic constructive scheme
// ---------------------------------------------------------------------------

namespace {

// Empirical quantile inf{y : F(y) >= x} of the counts map under the usual
// interpolated-CDF conventions, without materializing a Pmf.
double empirical_inverse(const std::map<std::uint64_t, std::uint64_t>& counts, std::uint64_t n,
                         double x) {
    double prev_y = 0.0, prev_f = 0.0;
    auto it = counts.begin();
    if (it->first == 0) {
        prev_f = static_cast<double>(it->second) / static_cast<double>(n);
        ++it;
    }
    if (x <= prev_f) return 0.0;
    for (; it != counts.end(); ++it) {
        const double y = static_cast<double>(it->first);
        double f = prev_f + static_cast<double>(it->second) / static_cast<double>(n);
        if (std::next(it) == counts.end()) f = 1.0;
        if (x <= f) return prev_y + (x - prev_f) / (f - prev_f) * (y - prev_y);
        prev_y = y;
        prev_f = f;
    }
    return prev_y;
}

double empirical_l1(const std::map<std::uint64_t, std::uint64_t>& counts, std::uint64_t n,
                    const Pmf& center) {
    double sum = 0.0;
    double matched = 0.0;
    for (const auto& [y, c] : counts) {
        const double e = static_cast<double>(c) / static_cast<double>(n);
        const double m = center.prob(y);
        sum += std::abs(e - m);
        matched += m;
    }
    sum += std::max(0.0, 1.0 - matched);  // center mass outside the sample
    return sum;
}

class GenericCursor final : public SchemeCursor {
public:
    explicit GenericCursor(const GenericScheme* owner) : owner_(owner) {}

    double dominant() const override {
        if (trapped_ == 0) return kInf;
        const double m = static_cast<double>(losses_.size());
        const double delta = owner_->eta() / (4.0 * m * (m + 1.0));
        const auto& c = owner_->quantization().centroids[trapped_ - 1];
        return 2.0 * c.quantile_bound(delta);
    }

    void observe(std::uint64_t loss) override {
        losses_.push_back(loss);
        if (counting_) ++counts_[loss];
        if (trapped_ != 0) return;
        const std::uint64_t n = losses_.size();
        if (n < owner_->min_entry_floor()) return;
        if (!counting_) {
            for (std::uint64_t y : losses_) ++counts_[y];
            counting_ = true;
        }
        const auto& cs = owner_->quantization().centroids;
        const auto& cells = owner_->cells();
        for (std::size_t i = 0; i < cs.size(); ++i) {
            if (n < cells[i].entry_floor) continue;
            if (empirical_l1(counts_, n, cs[i].center) >= cells[i].zone) continue;
            // cells[i].zone is also sqrt of the capture gap
            const double q = empirical_inverse(counts_, n, 1.0 - cells[i].zone / 6.0);
            if (2.0 * q <= cells[i].log2_cap) {
                trapped_ = cs[i].index;
                trap_length_ = n;
                break;
            }
        }
    }

    std::unique_ptr<SchemeCursor> clone() const override {
        return std::make_unique<GenericCursor>(*this);
    }

    std::uint32_t trapped_index() const { return trapped_; }
    std::size_t trap_length() const { return trap_length_; }

private:
    const GenericScheme* owner_;
    std::vector<std::uint64_t> losses_;
    std::map<std::uint64_t, std::uint64_t> counts_;
    bool counting_ = false;
    std::uint32_t trapped_ = 0;
    std::size_t trap_length_ = 0;
};

}  // namespace

GenericScheme::GenericScheme(Quantization quantization, double eta)
    : quantization_(std::move(quantization)), eta_(eta) {
    if (!(eta > 0.0) || !(eta < 1.0))
        throw std::invalid_argument("generic scheme: eta must lie in (0,1)");
    if (quantization_.centroids.empty())
        throw std::invalid_argument("generic scheme: quantization must be non-empty");
    const std::size_t k = quantization_.centroids.size();
    cells_.resize(k);
    min_entry_floor_ = kNoEntry;
    for (std::size_t i = 0; i < k; ++i) {
        const Centroid& c = quantization_.centroids[i];
        cells_[i].zone = c.zone_radius();
        cells_[i].gap = c.capture_gap();
        cells_[i].log2_cap = c.log2_capture_bound();
        // First n with exp(-n D / 18) <= eta / (2 C iota^2 n (n+1)). In log
        // space the condition reads s(n) := n D / 18 - ln(n (n+1)) >= rhs;
        // s falls until n ~ 36/D and rises without bound afterwards, so the
        // satisfying set is {1} when s(1) >= rhs, else a final segment of the
        // rising branch located by doubling plus bisection.
        const double rhs =
            std::log(2.0 * static_cast<double>(c.index) * static_cast<double>(c.index) / eta_) +
            cells_[i].log2_cap * 0.6931471805599453;
        const double gap = cells_[i].gap;
        auto s = [gap](std::uint64_t n) {
            const double nn = static_cast<double>(n);
            return nn * gap / 18.0 - std::log(nn * (nn + 1.0));
        };
        if (s(1) >= rhs) {
            cells_[i].entry_floor = 1;
        } else if (36.0 / gap >= static_cast<double>(kEntryScanCap)) {
            cells_[i].entry_floor = kNoEntry;
        } else {
            std::uint64_t lo = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(36.0 / gap));
            std::uint64_t hi = lo;
            while (hi < kEntryScanCap && s(hi) < rhs) hi *= 2;
            if (s(hi) < rhs) {
                cells_[i].entry_floor = kNoEntry;
            } else {
                while (lo + 1 < hi) {
                    const std::uint64_t mid = lo + (hi - lo) / 2;
                    (s(mid) >= rhs ? hi : lo) = mid;
                }
                cells_[i].entry_floor = s(lo) >= rhs ? lo : hi;
            }
        }
        min_entry_floor_ = std::min(min_entry_floor_, cells_[i].entry_floor);
    }
}

std::unique_ptr<SchemeCursor> GenericScheme::cursor() const {
    return std::make_unique<GenericCursor>(this);
}

std::optional<GenericScheme::TrapInfo> GenericScheme::trap_of(
    std::span<const std::uint64_t> losses) const {
    GenericCursor c(this);
    for (std::uint64_t y : losses) c.observe(y);
    if (c.trapped_index() == 0) return std::nullopt;
    return TrapInfo{c.trapped_index(), c.trap_length()};
}

std::shared_ptr<GenericScheme> generic_scheme(Quantization quantization, double eta) {
    return std::make_shared<GenericScheme>(std::move(quantization), eta);
}

// ---------------------------------------------------------------------------
// Insurance <-> domination
// ---------------------------------------------------------------------------

InsuranceScheme insurance_from_domination(std::shared_ptr<const DominationScheme> scheme) {
    if (!scheme) throw std::invalid_argument("insurance_from_domination: null scheme");
    InsuranceScheme s;
    s.initial_capital = 0.0;
    s.entered = [scheme](const History& h) { return std::isfinite(scheme->dominant(h)); };
    s.premium = [scheme](const History& h) {
        const double d = scheme->dominant(h);
        return std::isfinite(d) ? d : 0.0;
    };
    return s;
}

namespace {

class CapitalCursor final : public SchemeCursor {
public:
    explicit CapitalCursor(std::shared_ptr<const InsuranceScheme> s) : s_(std::move(s)) {}

    double dominant() const override {
        if (!s_->entered(h_)) return kInf;
        const double value = s_->initial_capital + capital_ + s_->premium(h_);
        return std::max(0.0, value);
    }

    void observe(std::uint64_t loss) override {
        if (s_->entered(h_)) capital_ += s_->premium(h_) - static_cast<double>(loss);
        h_.push(loss);
    }

    std::unique_ptr<SchemeCursor> clone() const override {
        return std::make_unique<CapitalCursor>(*this);
    }

private:
    std::shared_ptr<const InsuranceScheme> s_;
    History h_;
    double capital_ = 0.0;  // collected premiums net of paid losses
};

class CapitalScheme final : public DominationScheme {
public:
    explicit CapitalScheme(InsuranceScheme s)
        : s_(std::make_shared<const InsuranceScheme>(std::move(s))) {}
    std::unique_ptr<SchemeCursor> cursor() const override {
        return std::make_unique<CapitalCursor>(s_);
    }

private:
    std::shared_ptr<const InsuranceScheme> s_;
};

}  // namespace

std::shared_ptr<DominationScheme> domination_from_insurance(InsuranceScheme scheme) {
    if (!scheme.entered || !scheme.premium)
        throw std::invalid_argument("domination_from_insurance: incomplete scheme");
    if (!(scheme.initial_capital >= 0.0))
        throw std::invalid_argument("domination_from_insurance: negative initial capital");
    return std::make_shared<CapitalScheme>(std::move(scheme));
}

std::optional<std::size_t> bankruptcy_step(const DominationScheme& scheme,
                                           std::span<const std::uint64_t> path) {
    auto c = scheme.cursor();
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (c->dominant() < static_cast<double>(path[i])) return i + 1;
        c->observe(path[i]);
    }
    return std::nullopt;
}

}  // namespace insurelab
