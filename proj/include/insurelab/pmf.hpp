#pragma once

#include <cstdint>
#include <vector>

#include "insurelab/rng.hpp"

namespace insurelab {

/// A probability distribution on the naturals {0, 1, 2, ...}.
///
/// Stored either as an explicit finite table (strictly increasing support,
/// strictly positive masses summing to 1 within 1e-12) or as a parametric
/// kind with exact closed forms:
///   - geometric(rho):   p(y) = (1 - rho) * rho^y
///   - two_point(a,b,w): p(a) = w, p(b) = 1 - w
///
/// Parametric kinds answer mass/cumulative/tail/quantile queries from the
/// closed form, so nothing downstream depends on a truncation. The truncated
/// table kept for the geometric kind (cumulative mass >= 1 - 1e-12) is only
/// used where an explicit enumeration is unavoidable.
class Pmf {
public:
    enum class Kind { Finite, Geometric, TwoPoint };

    /// Point mass at 0.
    Pmf() : support_{0}, probs_{1.0}, cum_{1.0}, tail_{1.0} {}

    static Pmf finite(std::vector<std::uint64_t> support, std::vector<double> probs);
    static Pmf point_mass(std::uint64_t y);
    static Pmf uniform_range(std::uint64_t lo, std::uint64_t hi);
    static Pmf geometric(double rho);
    static Pmf two_point(std::uint64_t a, std::uint64_t b, double weight_a);

    Kind kind() const { return kind_; }
    bool infinite_support() const { return kind_ == Kind::Geometric; }

    double prob(std::uint64_t y) const;
    /// P(Y <= y); exact closed form for the geometric kind.
    double cum(std::uint64_t y) const;
    /// P(Y >= y); exact summation over the stored suffix sums for tables.
    double tail_from(std::uint64_t y) const;

    std::uint64_t min_support() const;
    /// Largest support point; invalid for the geometric kind.
    std::uint64_t max_support() const;

    /// Explicit table view (the >= 1 - 1e-12 truncation for geometric).
    const std::vector<std::uint64_t>& table_support() const { return support_; }
    const std::vector<double>& table_probs() const { return probs_; }

    double geometric_rho() const;
    std::uint64_t two_point_a() const;
    std::uint64_t two_point_b() const;
    double two_point_weight_a() const;

    double mean() const;
    double entropy_bits() const;
    /// True iff p(y+1) <= p(y) for every natural y (zero off-support mass
    /// included, so a finite monotone pmf has contiguous support from 0).
    bool is_monotone() const;

    std::uint64_t sample(Rng& rng) const;

    bool same_table(const Pmf& other, double tol = 0.0) const;

private:
    void build_sums();

    Kind kind_ = Kind::Finite;
    std::vector<std::uint64_t> support_;
    std::vector<double> probs_;
    std::vector<double> cum_;   // inclusive prefix sums over the table
    std::vector<double> tail_;  // inclusive suffix sums over the table
    double rho_ = 0.0;          // geometric parameter
    std::uint64_t a_ = 0, b_ = 0;
    double weight_a_ = 0.0;
};

/// Empirical type of a loss sequence: exact integer counts plus the derived
/// pmf with masses count/n.
struct EmpiricalType {
    std::vector<std::uint64_t> support;
    std::vector<std::uint64_t> counts;
    std::uint64_t total = 0;

    Pmf to_pmf() const;
};

EmpiricalType empirical_type(const std::vector<std::uint64_t>& losses);
Pmf empirical(const std::vector<std::uint64_t>& losses);

}  // namespace insurelab
