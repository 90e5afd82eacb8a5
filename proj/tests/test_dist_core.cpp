#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "insurelab/cdf.hpp"
#include "insurelab/divergence.hpp"
#include "insurelab/harness.hpp"
#include "insurelab/pmf.hpp"
#include "insurelab/rng.hpp"

using namespace insurelab;

namespace {
constexpr double kLn2 = 0.6931471805599453;
}

TEST_CASE("pmf validation") {
    CHECK_THROWS_AS(Pmf::finite({}, {}), std::invalid_argument);
    CHECK_THROWS_AS(Pmf::finite({0, 0}, {0.5, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS(Pmf::finite({0, 1}, {0.5, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(Pmf::finite({0, 1}, {0.7, 0.7}), std::invalid_argument);
    CHECK_THROWS_AS(Pmf::geometric(0.0), std::invalid_argument);
    CHECK_THROWS_AS(Pmf::geometric(1.0), std::invalid_argument);
    CHECK_THROWS_AS(Pmf::two_point(3, 3, 0.5), std::invalid_argument);

    const Pmf u = Pmf::uniform_range(2, 5);
    CHECK(u.min_support() == 2);
    CHECK(u.max_support() == 5);
    CHECK(u.prob(3) == doctest::Approx(0.25));
    CHECK(u.prob(6) == 0.0);
}

TEST_CASE("two-point atoms are normalized") {
    const Pmf t = Pmf::two_point(17, 0, 0.1);  // reordered to (0, 17)
    CHECK(t.two_point_a() == 0);
    CHECK(t.two_point_b() == 17);
    CHECK(t.two_point_weight_a() == doctest::Approx(0.9));
    CHECK(t.mean() == doctest::Approx(1.7));
}

TEST_CASE("empirical types") {
    CHECK_THROWS_AS(empirical({}), std::domain_error);

    const Pmf point = empirical({0, 0, 0, 0});
    CHECK(point.table_support() == std::vector<std::uint64_t>{0});
    CHECK(point.prob(0) == 1.0);

    const Pmf mixed = empirical({1, 2, 3, 1, 1, 1});
    CHECK(mixed.prob(1) == doctest::Approx(4.0 / 6.0));
    CHECK(mixed.prob(2) == doctest::Approx(1.0 / 6.0));
    CHECK(mixed.prob(3) == doctest::Approx(1.0 / 6.0));

    const Pmf even = empirical({2, 4, 2, 2, 4, 4, 4, 2});
    CHECK(even.prob(2) == doctest::Approx(0.5));
    CHECK(even.prob(4) == doctest::Approx(0.5));
}

TEST_CASE("empirical counts are exact over n") {
    Rng rng(11);
    for (int round = 0; round < 200; ++round) {
        const std::uint64_t n = 1 + rng.next_below(60);
        std::vector<std::uint64_t> seq(n);
        for (auto& y : seq) y = rng.next_below(7);
        const EmpiricalType t = empirical_type(seq);
        std::uint64_t total = 0;
        for (std::uint64_t c : t.counts) total += c;
        CHECK(total == n);
    }
}

TEST_CASE("cdf knots for a uniform support") {
    const PiecewiseLinearCdf f = build_cdf(Pmf::uniform_range(0, 3));
    REQUIRE(f.knots().size() == 4);
    CHECK(f.knots()[0].y == 0.0);
    CHECK(f.knots()[0].f == doctest::Approx(0.25));
    CHECK(f.knots()[1].f == doctest::Approx(0.5));
    CHECK(f.knots()[2].f == doctest::Approx(0.75));
    CHECK(f.knots()[3].f == 1.0);
}

TEST_CASE("cdf of a point mass") {
    const PiecewiseLinearCdf f = build_cdf(Pmf::point_mass(0));
    REQUIRE(f.knots().size() == 1);
    CHECK(f.knots()[0].y == 0.0);
    CHECK(f.knots()[0].f == 1.0);
    CHECK(f.inverse(1.0) == 0.0);
}

TEST_CASE("geometric cdf values") {
    const Pmf g = Pmf::geometric(0.5);
    const PiecewiseLinearCdf f = build_cdf(g);
    CHECK(f(0.0) == doctest::Approx(0.5));
    CHECK(f(1.0) == doctest::Approx(0.75));
    CHECK(f(2.0) == doctest::Approx(0.875));
    CHECK(f(std::numeric_limits<double>::infinity()) == 1.0);
    CHECK(f.inverse(1.0) == std::numeric_limits<double>::infinity());
    // monotone to 1
    double prev = 0.0;
    for (double y = 0.0; y < 40.0; y += 0.5) {
        CHECK(f(y) >= prev);
        prev = f(y);
    }
}

TEST_CASE("cdf inverse examples") {
    const PiecewiseLinearCdf f = build_cdf(Pmf::uniform_range(0, 3));
    CHECK(f.inverse(0.1) == 0.0);
    CHECK(f.inverse(0.875) == doctest::Approx(2.5));
    CHECK(f.inverse(1.0) == 3.0);
    CHECK_THROWS_AS(f.inverse(-0.1), std::domain_error);
    CHECK_THROWS_AS(f.inverse(1.5), std::domain_error);
}

TEST_CASE("cdf below a positive minimum support ramps from zero") {
    const PiecewiseLinearCdf f = build_cdf(Pmf::point_mass(3));
    CHECK(f(0.0) == 0.0);
    CHECK(f(1.5) == doctest::Approx(0.5));
    CHECK(f(3.0) == 1.0);
    CHECK(f.inverse(0.5) == doctest::Approx(1.5));
    CHECK(f.inverse(1.0) == 3.0);
}

TEST_CASE("tail and head report") {
    const Pmf u = Pmf::uniform_range(0, 3);
    const TailHeadReport r = tail_head(u, 0.5);
    CHECK(r.tail_threshold == doctest::Approx(1.0));
    CHECK(r.tail_mass == doctest::Approx(0.75));
    CHECK(r.head_threshold == doctest::Approx(4.0));
    CHECK(r.head_mass == doctest::Approx(1.0));

    const TailHeadReport point = tail_head(Pmf::point_mass(0), 0.5);
    CHECK(point.tail_mass == doctest::Approx(1.0));

    CHECK_THROWS_AS(tail_head(u, 0.0), std::domain_error);
    CHECK_THROWS_AS(tail_head(u, 1.0), std::domain_error);
}

TEST_CASE("geometric tail and head masses from the closed form") {
    const Pmf g = Pmf::geometric(0.5);
    const TailHeadReport r = tail_head(g, 0.3);
    // inverse(0.7) lands on the ramp of the first segment
    CHECK(r.tail_threshold == doctest::Approx(0.8));
    CHECK(r.tail_mass == doctest::Approx(0.5));  // P(Y >= 1)
    CHECK(r.head_threshold == doctest::Approx(3.6));
    CHECK(r.head_mass == doctest::Approx(0.9375));  // P(Y <= 3)
    CHECK(r.tail_mass > r.delta);
    CHECK(r.head_mass > 1.0 - r.delta);
}

TEST_CASE("geometric inverse round trip") {
    // valid above F(0) = 1 - rho; below it the inverse pins to 0
    const PiecewiseLinearCdf f = build_cdf(Pmf::geometric(0.7));
    CHECK(f.inverse(0.2) == 0.0);
    double prev = -1.0;
    for (int i = 0; i <= 200; ++i) {
        const double x = 0.3 + (0.999999 - 0.3) * static_cast<double>(i) / 200.0;
        const double y = f.inverse(x);
        CHECK(f(y) == doctest::Approx(x).epsilon(1e-9));
        CHECK(y >= prev);
        prev = y;
    }
}

TEST_CASE("cdf round trip and tail/head bounds on random pmfs") {
    Rng rng(20240817);
    for (int round = 0; round < 3000; ++round) {
        const Pmf p = random_finite_pmf(rng);
        const PiecewiseLinearCdf f = build_cdf(p);
        const double f_min = f(static_cast<double>(p.min_support()));
        double prev_inv = 0.0;
        for (int i = 0; i <= 16; ++i) {
            const double x =
                std::min(1.0, f_min + (1.0 - f_min) * static_cast<double>(i) / 16.0);
            const double y = f.inverse(x);
            CHECK(f(y) == doctest::Approx(x).epsilon(1e-9));
            CHECK(y >= prev_inv - 1e-12);
            prev_inv = y;
        }
        const double delta = 0.01 + 0.98 * rng.next_unit();
        const TailHeadReport r = tail_head(p, delta);
        CHECK(r.tail_mass > delta - 1e-12);
        CHECK(r.head_mass > 1.0 - delta - 1e-12);
    }
}

TEST_CASE("kl divergence") {
    const Pmf u01 = Pmf::uniform_range(0, 1);
    CHECK(kl_div(u01, u01) == 0.0);
    CHECK(kl_div(Pmf::point_mass(0), u01) == doctest::Approx(1.0));
    CHECK(std::isinf(kl_div(Pmf::point_mass(1), Pmf::point_mass(0))));
    CHECK(std::isinf(kl_div(Pmf::geometric(0.5), Pmf::uniform_range(0, 9))));
}

TEST_CASE("jdist examples") {
    const Pmf u01 = Pmf::uniform_range(0, 1);
    CHECK(jdist(u01, u01) == 0.0);
    CHECK(jdist(Pmf::geometric(0.3), Pmf::geometric(0.3)) == 0.0);
    CHECK(jdist(Pmf::point_mass(0), Pmf::point_mass(1)) == doctest::Approx(2.0));
    CHECK(jdist(u01, Pmf::point_mass(0)) == doctest::Approx(0.6225562489182657).epsilon(1e-12));
}

TEST_CASE("l1 distance examples") {
    const Pmf u01 = Pmf::uniform_range(0, 1);
    CHECK(l1_dist(u01, u01) == 0.0);
    CHECK(l1_dist(u01, Pmf::point_mass(0)) == doctest::Approx(1.0));
    CHECK(l1_dist(Pmf::point_mass(0), Pmf::point_mass(1)) == doctest::Approx(2.0));
}

TEST_CASE("jdist symmetry, positivity, and agreement with l1") {
    Rng rng(7);
    for (int round = 0; round < 500; ++round) {
        const Pmf p = random_finite_pmf(rng, 10, 50);
        const Pmf q = random_finite_pmf(rng, 10, 50);
        const double a = jdist(p, q);
        const double b = jdist(q, p);
        CHECK(a == doctest::Approx(b).epsilon(1e-12));
        CHECK(a >= 0.0);
        CHECK(a <= 2.0 + 1e-12);
        const double l1 = l1_dist(p, q);
        CHECK((a == 0.0) == (l1 == 0.0));
    }
}

TEST_CASE("divergence sums honor parametric tails") {
    // identical geometric tails cancel, distinct ones give a positive value
    const double j = jdist(Pmf::geometric(0.5), Pmf::geometric(0.6));
    CHECK(j > 0.0);
    const double l1 = l1_dist(Pmf::geometric(0.5), Pmf::geometric(0.6));
    CHECK(j >= l1 * l1 / (4.0 * kLn2) - 1e-9);
    CHECK(j <= l1 / kLn2 + 1e-9);

    Rng rng(57);
    for (int round = 0; round < 300; ++round) {
        const Pmf p = Pmf::geometric(0.05 + 0.9 * rng.next_unit());
        const Pmf q = rng.next_unit() < 0.5
                          ? Pmf::geometric(0.05 + 0.9 * rng.next_unit())
                          : random_finite_pmf(rng, 8, 30);
        const double jd = jdist(p, q);
        const double d1 = l1_dist(p, q);
        CHECK(d1 <= 2.0 + 1e-9);
        CHECK(jd <= 2.0 + 1e-9);
        CHECK(jd >= d1 * d1 / (4.0 * kLn2) - 1e-9);
        CHECK(jd <= d1 / kLn2 + 1e-9);
    }
}

TEST_CASE("geometric table carries each symbol once") {
    const Pmf g = Pmf::geometric(0.2746);
    const auto& s = g.table_support();
    for (std::size_t i = 1; i < s.size(); ++i) CHECK(s[i] == s[i - 1] + 1);
    CHECK(s.front() == 0);
    CHECK(g.table_probs().front() == doctest::Approx(1.0 - 0.2746));
    double sum = 0.0;
    for (double m : g.table_probs()) sum += m;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-11));
}

TEST_CASE("geometric sampling matches the closed-form cdf") {
    const Pmf g = Pmf::geometric(0.5);
    Rng rng(99);
    std::uint64_t below2 = 0;
    const std::uint64_t trials = 200000;
    for (std::uint64_t i = 0; i < trials; ++i)
        if (g.sample(rng) <= 1) ++below2;
    CHECK(static_cast<double>(below2) / static_cast<double>(trials) ==
          doctest::Approx(0.75).epsilon(0.01));
}
