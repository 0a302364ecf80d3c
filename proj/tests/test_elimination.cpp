#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "oneres/elimination.hpp"

using namespace oneres;
using Catch::Approx;

namespace {

GermSpec perturbed_k1(std::vector<std::tuple<MultiIndex, int, Cx>> tail_terms, int l = 6) {
    Multipliers m = make_multipliers(2, 1, 50);
    GermSpec base = make_normal_form(m, 1);
    int cap = 0;
    for (auto& [idx, c, v] : tail_terms) cap = std::max(cap, idx.degree());
    SeriesMap tail(2, cap);
    for (auto& [idx, c, v] : tail_terms) tail.set(idx, c, v);
    return make_perturbed(base, tail, l);
}

}  // namespace

TEST_CASE("solve_homological basics") {
    SECTION("linear map needs no conjugation") {
        Multipliers m = make_multipliers(2, 1, 50);
        SeriesMap F = SeriesMap::linear_diag(m.lambdas(), 6);
        ConjugationResult r = solve_homological(F, m.angles, ExponentSet::low_order(1),
                                                ExponentSet::degree_range(2, 6), 6);
        REQUIRE(max_coeff_diff(r.H, SeriesMap::identity(2, 6)) == 0.0);
        REQUIRE(max_coeff_diff(r.G, F) == 0.0);
        REQUIRE(r.residual == 0.0);
    }
    SECTION("one-dimensional quadratic: h_2 = 1/(lambda^2 - lambda)") {
        std::vector<double> angles{std::sqrt(2.0)};
        Cx lam = unit_phase(angles[0]);
        SeriesMap F(1, 5);
        F.set(MultiIndex{1}, 0, lam);
        F.set(MultiIndex{2}, 0, 1.0);
        ConjugationResult r = solve_homological(F, angles, ExponentSet::low_order(1),
                                                ExponentSet::degree_range(2, 5), 5);
        REQUIRE(std::abs(r.H.coeff(MultiIndex{2}, 0) - 1.0 / (lam * lam - lam)) < 1e-14);
        REQUIRE(r.max_eliminated_abs < 1e-12);
        REQUIRE(r.residual < 1e-14);
    }
    SECTION("degree-2 perturbation of a resonant diagonal dies out") {
        // F = Lambda z + (z^1)^2 e_1: every correction stays on the w = 0 axis,
        // no resonant index is ever loaded, and G comes out linear
        Multipliers m = make_multipliers(2, 1, 50);
        SeriesMap F = SeriesMap::linear_diag(m.lambdas(), 6);
        F.set(MultiIndex{2, 0}, 0, 1.0);
        ConjugationResult r = solve_homological(F, m.angles, ExponentSet::low_order(1),
                                                ExponentSet::degree_range(2, 6), 6,
                                                {.check_conditions = false});
        for (const auto& [idx, v] : r.G.c) REQUIRE(idx.degree() <= 1);
        REQUIRE(r.residual < 1e-13);
    }
}

TEST_CASE("condition checks") {
    Multipliers m = make_multipliers(2, 1, 50);
    GermSpec g = perturbed_k1({{MultiIndex{6, 0}, 0, Cx{1e-2, 0}}});
    SeriesMap F = g.to_series(10);
    SECTION("A0 not downward closed is flagged") {
        ExponentSet A0 = ExponentSet::explicit_set({MultiIndex{2, 1}}, "lonely");
        REQUIRE_THROWS_AS(
            solve_homological(F, m.angles, A0, ExponentSet::min_level(0, 5), 10),
            ConditionViolated);
    }
    SECTION("e_J landing inside A is flagged") {
        // eliminating the whole degree range invites e_J = (6,0)-type vectors
        REQUIRE_THROWS_AS(solve_homological(F, m.angles, ExponentSet::low_order(5),
                                            ExponentSet::degree_range(6, 10), 10),
                          ConditionViolated);
    }
    SECTION("min-0 level passes both conditions") {
        REQUIRE_NOTHROW(solve_homological(F, m.angles, ExponentSet::low_order(5),
                                          ExponentSet::min_level(0, 5), 10));
    }
    SECTION("a genuinely loaded resonant component raises ZeroDivisor") {
        SeriesMap bad = g.to_series(8);
        bad.set(MultiIndex{4, 3}, 0, Cx{1e-3, 0});  // resonant for component 1
        REQUIRE_THROWS_AS(
            solve_homological(bad, m.angles, ExponentSet::empty(),
                              ExponentSet::degree_range(7, 8), 8, {.check_conditions = false}),
            ZeroDivisor);
    }
}

TEST_CASE("iterated elimination on the perturbed germ") {
    GermSpec g = perturbed_k1({{MultiIndex{6, 0}, 0, Cx{1e-2, 0}},
                               {MultiIndex{5, 1}, 1, Cx{2e-2, 0}}});
    const int cap = 12;
    SeriesMap F = g.to_series(cap);
    ExponentSet A0 = ExponentSet::low_order(5);
    std::vector<ExponentSet> levels{ExponentSet::min_level(0, 5), ExponentSet::min_level(1, 5)};
    ConjugationResult r = iterated_elimination(F, g.mult.angles, A0, levels, cap);
    SECTION("eliminated coefficients vanish") { REQUIRE(r.max_eliminated_abs < 1e-10); }
    SECTION("preserved coefficients are bit-identical") {
        for (const auto& [idx, v] : F.c) {
            if (!A0.contains(idx)) continue;
            for (int j = 0; j < 2; ++j) {
                REQUIRE(r.G.coeff(idx, j) == v[j]);
            }
        }
    }
    SECTION("conjugation identity in coefficients and pointwise") {
        REQUIRE(r.residual < 1e-9 * std::max(1.0, F.max_abs()) / r.divisor_floor);
        std::mt19937_64 gen(4);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (int t = 0; t < 100; ++t) {
            CVec z{7e-3 * Cx{u(gen), u(gen)}, 7e-3 * Cx{u(gen), u(gen)}};
            CVec hg = evaluate(r.H, evaluate(r.G, z));
            CVec fh = evaluate(F, evaluate(r.H, z));
            for (int j = 0; j < 2; ++j) REQUIRE(std::abs(hg[j] - fh[j]) < 1e-8);
        }
    }
    SECTION("single-level partition reduces to the plain solver") {
        ConjugationResult one =
            solve_homological(F, g.mult.angles, A0, levels[0], cap);
        ConjugationResult it =
            iterated_elimination(F, g.mult.angles, A0, {levels[0]}, cap);
        REQUIRE(max_coeff_diff(one.G, it.G) < 1e-12);
        REQUIRE(max_coeff_diff(one.H, it.H) < 1e-12);
    }
    SECTION("tail-free germ needs nothing") {
        Multipliers m = make_multipliers(2, 1, 50);
        SeriesMap FN = make_normal_form(m, 1).to_series(cap);
        ConjugationResult rr = iterated_elimination(FN, m.angles, A0, levels, cap);
        REQUIRE(max_coeff_diff(rr.H, SeriesMap::identity(2, cap)) == 0.0);
    }
}

TEST_CASE("nicer tail preset") {
    const int cap = 14;
    SECTION("tail z^3 w^3 is eliminated, survivors sit above (6,6)") {
        GermSpec g = perturbed_k1({{MultiIndex{3, 3}, 0, Cx{1e-2, 0}}});
        NicerTailResult nt = nicer_tail_preset(g, cap);
        REQUIRE(std::abs(nt.conj.G.coeff(MultiIndex{3, 3}, 0)) < 1e-10);
        REQUIRE(nt.offzone_clean(1e-10));
        REQUIRE(nt.conj.residual < 1e-12);
        bool found_66 = false;
        for (const auto& [idx, mag] : nt.survivors) {
            REQUIRE(idx.min_entry() >= 6);
            if (idx == MultiIndex{6, 6}) found_66 = true;
        }
        REQUIRE(found_66);  // the pushed tail lands on the resonant-zone corner
    }
    SECTION("tail z^6 w^6 survives unchanged") {
        GermSpec g = perturbed_k1({{MultiIndex{6, 6}, 0, Cx{1e-2, 0}}}, 6);
        NicerTailResult nt = nicer_tail_preset(g, cap);
        REQUIRE(nt.conj.G.coeff(MultiIndex{6, 6}, 0) == Cx{1e-2, 0});
        REQUIRE(max_coeff_diff(nt.conj.H, SeriesMap::identity(2, cap)) == 0.0);
    }
    SECTION("tail-free input returns the normal form") {
        Multipliers m = make_multipliers(2, 1, 50);
        GermSpec g = make_normal_form(m, 1);
        g.l = 6;
        NicerTailResult nt = nicer_tail_preset(g, cap);
        REQUIRE(max_coeff_diff(nt.conj.G, g.to_series(cap)) == 0.0);
        REQUIRE(nt.survivors.empty());
    }
}
