#include <doctest.h>

#include <cmath>

#include "rankone/bfree.hpp"
#include "rankone/errors.hpp"
#include "rankone/returnwords.hpp"

using namespace rankone;
using bfree::BFreeSet;

namespace {
// high-precision references recomputed from the Euler products
constexpr double kZeta1 = 1.6449340668482264365; // pi^2/6
constexpr double kZeta2 = 3.0994863943017700585;
constexpr double kZeta3 = 7.9689541718323862217;
constexpr double kF1 = 0.08814588488134658584;
constexpr double kF11 = 0.07166013712762607391;
constexpr double kF111 = 0.12548698090580929833;
} // namespace

TEST_CASE("residue class counts") {
    CHECK(bfree::residue_class_count({1, 2, 3}, 4) == 3);
    CHECK(bfree::residue_class_count({1, 5}, 4) == 1);
    CHECK(bfree::residue_class_count({1, 2, 3, 4}, 4) == 4); // complete system mod 4
}

TEST_CASE("admissibility for the square-free family") {
    auto B = BFreeSet::squarefree();
    CHECK(bfree::is_admissible({1, 2, 3}, B));
    CHECK_FALSE(bfree::is_admissible({1, 2, 3, 4}, B));
    CHECK(bfree::is_admissible({}, B));
}

TEST_CASE("explicit sets are validated") {
    CHECK_THROWS_AS(BFreeSet::explicit_set({4, 6}), ConfigError); // gcd 2
    CHECK_THROWS_AS(BFreeSet::explicit_set({1, 5}), ConfigError);
    CHECK_THROWS_AS(BFreeSet::explicit_set({}), ConfigError);
    CHECK(BFreeSet::explicit_set({9, 4, 25}).b1() == 4); // sorted on entry
}

TEST_CASE("positive cylinder measures") {
    auto B = BFreeSet::squarefree();
    CHECK(bfree::cylinder_measure_positive({}, B) == doctest::Approx(1.0));
    CHECK(bfree::cylinder_measure_positive({1}, B) ==
          doctest::Approx(1.0 / kZeta1).epsilon(1e-7));
    CHECK(bfree::cylinder_measure_positive({1, 2, 3}, B) ==
          doctest::Approx(1.0 / kZeta3).epsilon(1e-6));
    CHECK(bfree::cylinder_measure_positive({1, 2, 3, 4}, B) == 0.0); // not admissible
}

TEST_CASE("measure is monotone under inclusion") {
    auto B = BFreeSet::squarefree();
    double prev = 1.0;
    std::vector<std::int64_t> A;
    for (std::int64_t a : {1, 2, 3, 5, 7}) {
        A.push_back(a);
        double m = bfree::cylinder_measure_positive(A, B, 1e-6);
        CHECK(m <= prev + 1e-12);
        prev = m;
    }
}

TEST_CASE("cylinder measures with 0-positions") {
    auto B = BFreeSet::squarefree();
    CHECK(std::abs(bfree::cylinder_measure({{1}, {2}}, B) - 0.285293) < 1e-6);
    CHECK(std::abs(bfree::cylinder_measure({{1, 2}, {3}}, B) - 0.197147) < 1e-6);
    CHECK(bfree::cylinder_measure({{}, {}}, B) == doctest::Approx(1.0));
}

TEST_CASE("cylinder spec validation") {
    auto B = BFreeSet::squarefree();
    CHECK_THROWS_AS(bfree::cylinder_measure({{1}, {1}}, B), ConfigError);
    CHECK_THROWS_AS(bfree::cylinder_measure({{1}, {0}}, B), ConfigError);
    bfree::CylinderSpec wide;
    for (std::int64_t i = 1; i <= 21; ++i) wide.zeros.push_back(i + 1000);
    CHECK_THROWS_AS(bfree::cylinder_measure(wide, B), TooManyFreePositions);
}

TEST_CASE("euler zeta values over the primes") {
    auto B = BFreeSet::squarefree();
    CHECK(std::abs(bfree::euler_zeta(1, 2.0, B) - kZeta1) < 5e-7);
    CHECK(std::abs(bfree::euler_zeta(2, 2.0, B) - kZeta2) < 5e-7);
    CHECK(std::abs(bfree::euler_zeta(3, 2.0, B) - kZeta3) < 5e-7);
}

TEST_CASE("euler zeta of a finite explicit family is exact") {
    auto B = BFreeSet::explicit_set({4, 9});
    // factors (1 - 3/4)(1 - 3/9) with the s/2 exponent at s = 2
    CHECK(bfree::euler_zeta(3, 2.0, B) == doctest::Approx(6.0).epsilon(1e-14));
    CHECK_THROWS_AS(bfree::euler_zeta(4, 2.0, B), Divergent); // factor 1 - 4/4 = 0
}

TEST_CASE("euler zeta divergence and unreachable precision") {
    auto B = BFreeSet::squarefree();
    CHECK_THROWS_AS(bfree::euler_zeta(1, 1.0, B), Divergent);
    CHECK_THROWS_AS(bfree::euler_zeta(1, 2.0, B, 1e-15), PrecisionUnreachable);
}

TEST_CASE("square-free exact frequencies by both routes") {
    FrequencyTable t = bfree::exact_frequencies(BFreeSet::squarefree());
    CHECK(t.method == FreqMethod::mirsky);
    CHECK(std::abs(t.exact.at(parse_word("1")) - kF1) < 5e-7);
    CHECK(std::abs(t.exact.at(parse_word("11")) - kF11) < 5e-7);
    CHECK(std::abs(t.exact.at(parse_word("111")) - kF111) < 5e-7);
    CHECK(t.exact.size() == 3);
    CHECK(t.rho0 == doctest::Approx(1.0 - 1.0 / kZeta1).epsilon(1e-7));

    double mass = 0.0;
    for (const auto& [w, f] : t.exact) mass += static_cast<double>(w.size() + 1) * f;
    CHECK(mass <= 1.0);
}

TEST_CASE("return-word set bound for large b1") {
    CHECK_THROWS_AS(bfree::exact_frequencies(BFreeSet::explicit_set({101})), ConfigError);
}

TEST_CASE("analytic frequencies match the sieve") {
    FrequencyTable analytic = bfree::exact_frequencies(BFreeSet::squarefree());
    Word eta = BFreeSet::squarefree().characteristic(1000000);
    FrequencyTable emp = empirical_exact_frequencies(eta);
    CHECK(table_discrepancy(analytic, emp) < 3e-3);
}

TEST_CASE("exact frequencies of a small explicit family") {
    // B = {2}: even positions forced to 0, so R = {1} and F_1 = 1/2.
    FrequencyTable t = bfree::exact_frequencies(BFreeSet::explicit_set({2}));
    CHECK(t.exact.at(parse_word("1")) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(t.rho0 == doctest::Approx(0.5).epsilon(1e-12));
}
