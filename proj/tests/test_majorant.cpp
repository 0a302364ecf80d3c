#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "oneres/elimination.hpp"
#include "oneres/majorant.hpp"

using namespace oneres;
using Catch::Approx;

TEST_CASE("sigma recursion values") {
    for (int d : {1, 2, 3, 5}) {
        std::vector<double> s = sigma_by_recursion(d, 6);
        REQUIRE(s[1] == 1.0);
        REQUIRE(s[2] == Approx(static_cast<double>(d)));
        REQUIRE(s[3] == Approx(2.0 * d * d + d));
    }
}

TEST_CASE("sigma recursion matches the closed-form Taylor coefficients") {
    for (int d : {1, 2, 3}) {
        std::vector<double> a = sigma_by_recursion(d, 20);
        std::vector<double> b = sigma_by_closed_form(d, 20);
        for (int r = 1; r <= 20; ++r)
            REQUIRE(std::abs(a[r] - b[r]) <= 1e-10 * std::abs(b[r]));
    }
}

TEST_CASE("generating function identity sigma = t + d sigma^2/(1-sigma)") {
    std::vector<double> res = sigma_gf_residual(2, 20);
    std::vector<double> s = sigma_by_recursion(2, 20);
    for (int r = 1; r <= 20; ++r) REQUIRE(std::abs(res[r]) <= 1e-10 * std::max(1.0, s[r]));
}

namespace {

ConjugationResult reference_conjugation(GermSpec& g, int cap) {
    Multipliers m = make_multipliers(2, 1, 50);
    GermSpec base = make_normal_form(m, 1);
    SeriesMap tail(2, 6);
    tail.set(MultiIndex{6, 0}, 0, Cx{1e-2, 0});
    tail.set(MultiIndex{5, 1}, 1, Cx{2e-2, 0});
    g = make_perturbed(base, tail, 6);
    ExponentSet A0 = ExponentSet::low_order(5);
    std::vector<ExponentSet> levels{ExponentSet::min_level(0, 5), ExponentSet::min_level(1, 5)};
    return iterated_elimination(g.to_series(cap), g.mult.angles, A0, levels, cap);
}

}  // namespace

TEST_CASE("divisor trees and the counting bound") {
    GermSpec g;
    const int cap = 12;
    ConjugationResult conj = reference_conjugation(g, cap);
    ExponentSet A = ExponentSet::custom(
        [cap](const MultiIndex& a) {
            return a.degree() >= 6 && a.degree() <= cap && a.min_entry() <= 1;
        },
        "min<=1");
    MajorantReport rep = majorant_diagnostics(2, cap, &conj, &A);
    SECTION("||h_a||_1 <= sigma_|a| delta_a") {
        REQUIRE(rep.have_conjugation);
        REQUIRE(rep.h_bound_ok);
        REQUIRE(rep.h_bound_worst_margin >= 0.0);
    }
    SECTION("N_m^j <= 2|a|/m - 1 at every recorded node") { REQUIRE(rep.counting_ok); }
    SECTION("delta growth stays below the dyadic bound") {
        REQUIRE(rep.growth_ok);
        REQUIRE(rep.growth_worst <= rep.growth_bound);
    }
}

TEST_CASE("divisor tree structure") {
    std::vector<double> angles{std::sqrt(2.0), -std::sqrt(2.0)};
    ExponentSet A = ExponentSet::min_level(0, 5);
    DivisorTreeSet t = build_divisor_trees(angles, A, 10);
    SECTION("every A-index up to the cap carries a tree") {
        for (const MultiIndex& a : A.members(2, 10)) {
            REQUIRE(t.log_delta.count(a) == 1);
            REQUIRE(t.parts.count(a) == 1);
        }
    }
    SECTION("delta >= 1/eps via the all-units decomposition") {
        for (const auto& [a, ld] : t.log_delta)
            REQUIRE(ld >= -std::log(t.eps.at(a)) - 1e-12);
    }
    SECTION("flattened parts sum back to the index") {
        for (const auto& [a, parts] : t.parts) {
            MultiIndex sum(2);
            for (const MultiIndex& p : parts) sum = sum + p;
            REQUIRE(sum == a);
            REQUIRE(parts.size() >= 2);
        }
    }
}
