#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "oneres/brjuno.hpp"

using namespace oneres;
using Catch::Approx;

TEST_CASE("omega for the one-dimensional analog of sqrt(2)") {
    std::vector<double> angles{std::sqrt(2.0)};
    ExponentSet A = ExponentSet::custom([](const MultiIndex& a) { return a.degree() >= 2; },
                                        "deg>=2");
    BrjunoReport r = brjuno_omega(angles, A, 7);
    SECTION("omega(2) = 1: |lambda^2 - lambda| ~ 1.93 exceeds the cap") {
        REQUIRE(r.omega[0] == 1.0);
    }
    SECTION("omega(128) is the continued-fraction divisor at alpha = 71") {
        long double dev = 70.0L * std::sqrt(2.0L);
        dev -= std::roundl(dev);
        double expect = 2.0 * std::abs(std::sin(3.14159265358979323846264338327950288L * dev));
        REQUIRE(r.omega[6] == Approx(expect).epsilon(1e-12));
        REQUIRE(r.witnesses[6].alpha == MultiIndex{71});
        REQUIRE(r.omega[6] == Approx(0.0317).epsilon(2e-2));
    }
}

TEST_CASE("omega monotonicity and partial sums") {
    Multipliers m = make_multipliers(2, 1, 50);
    ExponentSet A1 = ExponentSet::level_set(1, 2);
    BrjunoReport r = brjuno_omega(m, A1, 8);
    SECTION("omega values lie in (0,1] and do not increase") {
        for (int i = 0; i < r.levels; ++i) {
            REQUIRE(r.omega[i] > 0.0);
            REQUIRE(r.omega[i] <= 1.0);
            if (i > 0) REQUIRE(r.omega[i] <= r.omega[i - 1]);
        }
    }
    SECTION("partial sums do not decrease") {
        for (int i = 1; i < r.levels; ++i) REQUIRE(r.partial_sums[i] >= r.partial_sums[i - 1]);
    }
    SECTION("all-omega-one set gives zero partial sums") {
        // only the single far-from-resonance index (2,0)
        ExponentSet one = ExponentSet::explicit_set({MultiIndex{2, 0}});
        BrjunoReport rr = brjuno_omega(m, one, 3);
        for (double s : r.partial_sums) REQUIRE(s >= 0.0);
        for (int i = 0; i < rr.levels; ++i) REQUIRE(rr.omega[i] <= 1.0);
    }
    SECTION("d=2 increments: decreasing on 4..8 but not from 3 to 4") {
        // frozen from the dyadic scan of the sqrt(2) divisors: the continued
        // fraction of sqrt(2) puts omega(8) ~ 0.443 and omega(16) ~ 0.185,
        // so the m=3 -> m=4 increment rises before the decay sets in
        REQUIRE(r.increments_decrease(4, 8));
        REQUIRE_FALSE(r.increments_decrease(3, 8));
        REQUIRE(r.omega[2] == Approx(0.4428).epsilon(1e-3));
        REQUIRE(r.omega[3] == Approx(0.1847).epsilon(1e-3));
    }
    SECTION("d=3 increments decrease over the full 3..8 range") {
        Multipliers m3 = make_multipliers(3, 1, 40);
        BrjunoReport r3 = brjuno_omega(m3, ExponentSet::level_set(1, 3), 8);
        REQUIRE(r3.increments_decrease(3, 8));
    }
}

TEST_CASE("resonant exponent set is rejected") {
    Multipliers m = make_multipliers(2, 1, 50);
    ExponentSet bad = ExponentSet::explicit_set({MultiIndex{2, 1}}, "resonant");
    REQUIRE_THROWS_AS(brjuno_omega(m, bad, 2), ZeroDivisor);
}

TEST_CASE("partial sum report flags decay") {
    Multipliers m3 = make_multipliers(3, 1, 40);
    BrjunoReport r3 = brjuno_omega(m3, ExponentSet::level_set(1, 3), 8);
    PartialSumReport p = brjuno_partial_sums(r3);
    REQUIRE(p.sums.size() == 8);
    REQUIRE(p.increments_decay);
}
