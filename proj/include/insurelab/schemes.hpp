#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "insurelab/model_class.hpp"
#include "insurelab/pmf.hpp"

namespace insurelab {

/// A loss history with cached statistics (length, running maximum, symbol
/// counts) kept in sync with the raw sequence.
class History {
public:
    History() = default;
    explicit History(std::vector<std::uint64_t> losses);

    void push(std::uint64_t loss);

    std::size_t size() const { return losses_.size(); }
    std::uint64_t running_max() const { return max_; }
    const std::vector<std::uint64_t>& losses() const { return losses_; }
    const std::map<std::uint64_t, std::uint64_t>& counts() const { return counts_; }

private:
    std::vector<std::uint64_t> losses_;
    std::uint64_t max_ = 0;
    std::map<std::uint64_t, std::uint64_t> counts_;
};

/// Incremental evaluator for one path. dominant() is the bound proposed for
/// the next loss given the prefix consumed so far; +infinity means the
/// scheme has not entered yet.
class SchemeCursor {
public:
    virtual ~SchemeCursor() = default;
    virtual double dominant() const = 0;
    virtual void observe(std::uint64_t loss) = 0;
    virtual std::unique_ptr<SchemeCursor> clone() const = 0;
};

/// A deterministic mapping from loss histories to dominants in R+ u {inf}.
/// Once finite on a history, the dominant stays finite on every extension.
class DominationScheme {
public:
    virtual ~DominationScheme() = default;
    virtual std::unique_ptr<SchemeCursor> cursor() const = 0;

    /// Replays the history through a fresh cursor.
    double dominant(const History& h) const;
    double dominant(std::span<const std::uint64_t> losses) const;
};

/// Proposes infinity for the first log2(1/eta) + 1 steps and twice the
/// largest observed loss afterwards.
class DoublingScheme final : public DominationScheme {
public:
    explicit DoublingScheme(double eta);
    std::unique_ptr<SchemeCursor> cursor() const override;
    double eta() const { return eta_; }

private:
    double eta_;
    double entry_threshold_;
};

/// Enters immediately; at history length i the dominant is
/// 2 * 2^(2 h (i+1)(i+2) / eta), i.e. twice the entropy-based quantile bound
/// at delta_i / 2 where delta_i = eta / ((i+1)(i+2)), so the per-step
/// failure budget sums to at most eta.
class EntropyScheme final : public DominationScheme {
public:
    EntropyScheme(double h, double eta);
    std::unique_ptr<SchemeCursor> cursor() const override;

private:
    double h_;
    double eta_;
};

/// The constructive scheme over a quantization. While untrapped the scheme
/// proposes infinity; at each length n it computes the empirical type and
/// captures it by the smallest-index centroid whose zone contains it,
/// provided the two entry conditions hold:
///   (a) exp(-n D / 18) <= eta / (2 C iota^2 n (n+1))
///   (b) 2 F_emp^{-1}(1 - sqrt(D)/6) <= log2 C
/// with D the centroid's capture gap and C its capture bound. The first
/// capture along a path is permanent; a trapped history of length m gets the
/// dominant 2 g(eta / (4 m (m+1))).
class GenericScheme final : public DominationScheme {
public:
    GenericScheme(Quantization quantization, double eta);
    std::unique_ptr<SchemeCursor> cursor() const override;

    const Quantization& quantization() const { return quantization_; }
    double eta() const { return eta_; }

    struct TrapInfo {
        std::uint32_t centroid_index;
        std::size_t trap_length;
    };
    /// Replays a history and reports which centroid traps it, if any.
    std::optional<TrapInfo> trap_of(std::span<const std::uint64_t> losses) const;

    /// Per-centroid constants used at every step.
    struct Cell {
        double zone = 0.0;      // l1 capture radius
        double gap = 0.0;       // zone^2, the D of condition (a)
        double log2_cap = 0.0;  // log2 C
        /// Smallest history length at which condition (a) can hold;
        /// UINT64_MAX when it is beyond the scanning range.
        std::uint64_t entry_floor = 0;
    };
    const std::vector<Cell>& cells() const { return cells_; }
    std::uint64_t min_entry_floor() const { return min_entry_floor_; }

private:
    Quantization quantization_;
    double eta_;
    std::vector<Cell> cells_;
    std::uint64_t min_entry_floor_ = 0;
};

std::shared_ptr<DoublingScheme> doubling_scheme(double eta);
std::shared_ptr<EntropyScheme> entropy_scheme(double h, double eta);
std::shared_ptr<GenericScheme> generic_scheme(Quantization quantization, double eta);

/// Entry rule tau (monotone under extension), premium rule Pi (zero before
/// entry) and the initial capital.
struct InsuranceScheme {
    double initial_capital = 0.0;
    std::function<bool(const History&)> entered;
    std::function<double(const History&)> premium;
};

/// tau = entered iff the dominant is finite; the premium equals the dominant
/// where finite; zero initial capital.
InsuranceScheme insurance_from_domination(std::shared_ptr<const DominationScheme> scheme);

/// Capital-accounting dominant: infinity before entry, afterwards the
/// initial capital plus all collected premiums net of paid losses plus the
/// current premium. The returned dominant is clamped at 0 from below; the
/// first step where the unclamped capital would go negative is already a
/// bankruptcy under the clamped comparison, so clamping never moves the
/// first bankruptcy step.
std::shared_ptr<DominationScheme> domination_from_insurance(InsuranceScheme scheme);

/// Smallest n with dominant(x^{n-1}) < x_n, 1-based; nullopt when the path
/// never exceeds a proposed dominant.
std::optional<std::size_t> bankruptcy_step(const DominationScheme& scheme,
                                           std::span<const std::uint64_t> path);

}  // namespace insurelab
