#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "oneres/germ.hpp"
#include "oneres/json_io.hpp"

using namespace oneres;
using Catch::Approx;

TEST_CASE("make_multipliers") {
    SECTION("default d=2 scheme passes the scan at degree 50") {
        Multipliers m = make_multipliers(2, 1, 50);
        REQUIRE(m.angles[0] == Approx(std::sqrt(2.0)));
        REQUIRE(m.angles[1] == Approx(-std::sqrt(2.0)));
        REQUIRE(std::abs(m.lambda(0) - std::conj(m.lambda(1))) < 1e-15);
    }
    SECTION("unit modulus and integer angle sum") {
        for (int d : {2, 3, 4}) {
            Multipliers m = make_multipliers(d, 1, 30);
            long double s = 0;
            for (int j = 0; j < d; ++j) {
                REQUIRE(std::abs(std::abs(m.lambda(j)) - 1.0) < 1e-15);
                s += m.angles[j];
            }
            REQUIRE(std::abs(s - std::roundl(s)) < 1e-12);
        }
    }
    SECTION("theta = (1/2, 1/2) is a root of unity") {
        REQUIRE_THROWS_AS(make_multipliers(2, {0.5, 0.5}, 1, 50), RootOfUnity);
    }
    SECTION("d=3 first-primes scheme passes at degree 30") {
        REQUIRE_NOTHROW(make_multipliers(3, 1, 30));
    }
    SECTION("repeated angle gives an extra resonance") {
        double t = std::sqrt(2.0) - 1.0;
        REQUIRE_THROWS_AS(make_multipliers(3, {t, t, -2.0 * t}, 1, 10), ExtraResonance);
    }
    SECTION("test mode admits lambda = 1") {
        Multipliers m = make_multipliers(2, {0.0, 0.0}, 1, 50, true);
        REQUIRE(m.lambda(0) == Cx{1.0, 0.0});
    }
}

TEST_CASE("normal form") {
    Multipliers m = make_multipliers(2, 1, 50);
    GermSpec g = make_normal_form(m, 1);
    SECTION("coefficient of z^2 w in component 1 is -lambda_1/2") {
        SeriesMap s = g.to_series(4);
        REQUIRE(std::abs(s.coeff(MultiIndex{2, 1}, 0) + m.lambda(0) / 2.0) < 1e-15);
        REQUIRE(std::abs(s.coeff(MultiIndex{1, 2}, 1) + m.lambda(1) / 2.0) < 1e-15);
    }
    SECTION("fixed point at the origin") {
        CVec z{Cx{0, 0}, Cx{0, 0}};
        CVec w = g.evaluate(z);
        REQUIRE(w[0] == Cx{});
        REQUIRE(w[1] == Cx{});
    }
    SECTION("resonant product transforms as u (1 - u^k/(kd))^d") {
        std::mt19937_64 gen(1);
        std::uniform_real_distribution<double> u01(-1.0, 1.0);
        for (int k : {1, 2}) {
            Multipliers mk = make_multipliers(2, k, 50);
            GermSpec gk = make_normal_form(mk, k);
            for (int t = 0; t < 100; ++t) {
                CVec z{0.2 * Cx{u01(gen), u01(gen)}, 0.2 * Cx{u01(gen), u01(gen)}};
                Cx u = z[0] * z[1];
                CVec w = gk.evaluate(z);
                Cx lhs = w[0] * w[1];
                Cx uk = 1.0;
                for (int i = 0; i < k; ++i) uk *= u;
                Cx f = 1.0 - uk / (2.0 * k);
                Cx rhs = u * std::pow(f, 2.0);
                REQUIRE(std::abs(lhs - rhs) <= 1e-12 * std::abs(rhs));
            }
        }
    }
    SECTION("symbolic form of the projected map via series") {
        // pi(F_N(z)) as a series in z equals u prod(1 - u^k/(kd))^d expanded
        SeriesMap s = g.to_series(6);
        ScalarSeries prod = multiply(s.component(0), s.component(1), 6);
        ScalarSeries expect(2);
        // u (1 - u/2)^2 = u - u^2 + u^3/4
        expect.set(MultiIndex{1, 1}, 1.0);
        expect.set(MultiIndex{2, 2}, -1.0);
        expect.set(MultiIndex{3, 3}, 0.25);
        for (const auto& [idx, v] : prod.c) REQUIRE(std::abs(v - expect.coeff(idx)) < 1e-14);
    }
}

TEST_CASE("perturbed germ") {
    Multipliers m = make_multipliers(2, 1, 50);
    GermSpec base = make_normal_form(m, 1);
    SECTION("degree-6 tail accepted at l = 6") {
        SeriesMap tail(2, 6);
        tail.set(MultiIndex{3, 3}, 0, Cx{1e-2, 0});
        GermSpec g = make_perturbed(base, tail, 6);
        REQUIRE(g.l == 6);
        REQUIRE_FALSE(g.tail_free());
    }
    SECTION("empty tail leaves the base unchanged pointwise") {
        SeriesMap tail(2, 0);
        GermSpec g = make_perturbed(base, tail, 6);
        CVec z{Cx{0.05, 0.02}, Cx{-0.04, 0.01}};
        CVec a = g.evaluate(z), b = base.evaluate(z);
        REQUIRE(a[0] == b[0]);
        REQUIRE(a[1] == b[1]);
    }
    SECTION("low-degree tail monomial rejected") {
        SeriesMap tail(2, 3);
        tail.set(MultiIndex{2, 1}, 0, Cx{1e-3, 0});
        REQUIRE_THROWS_AS(make_perturbed(base, tail, 6), TailTooLow);
    }
}

TEST_CASE("evaluate") {
    SECTION("test-mode arithmetic oracle at lambda = 1") {
        Multipliers m = make_multipliers(2, {0.0, 0.0}, 1, 50, true);
        GermSpec g = make_normal_form(m, 1);
        CVec w = g.evaluate(CVec{Cx{0.1, 0}, Cx{0.1, 0}});
        REQUIRE(w[0].real() == Approx(0.0995).epsilon(1e-12));
        REQUIRE(w[1].real() == Approx(0.0995).epsilon(1e-12));
    }
    SECTION("coordinate hyperplanes are invariant and rotated rigidly") {
        Multipliers m = make_multipliers(2, 1, 50);
        GermSpec g = make_normal_form(m, 1);
        CVec z{Cx{0, 0}, Cx{0.05, 0.02}};
        for (int n = 0; n < 50; ++n) {
            z = g.evaluate(z);
            REQUIRE(z[0] == Cx{});
            REQUIRE(std::abs(std::abs(z[1]) - std::abs(Cx{0.05, 0.02})) < 1e-12);
        }
    }
    SECTION("series evaluation matches the direct germ evaluation") {
        Multipliers m = make_multipliers(2, 1, 50);
        GermSpec g = make_normal_form(m, 1);
        SeriesMap s = g.to_series(4);
        std::mt19937_64 gen(2);
        std::uniform_real_distribution<double> u01(-1.0, 1.0);
        for (int t = 0; t < 100; ++t) {
            CVec z{0.1 * Cx{u01(gen), u01(gen)}, 0.1 * Cx{u01(gen), u01(gen)}};
            CVec a = g.evaluate(z);
            CVec b = evaluate(s, z);
            for (int j = 0; j < 2; ++j) REQUIRE(std::abs(a[j] - b[j]) < 1e-12);
        }
    }
}

TEST_CASE("germ json round trip") {
    Multipliers m = make_multipliers(2, 1, 50);
    GermSpec base = make_normal_form(m, 1);
    SeriesMap tail(2, 6);
    tail.set(MultiIndex{3, 3}, 0, Cx{1e-2, -2e-3});
    GermSpec g = make_perturbed(base, tail, 6);
    json j = germ_to_json(g);
    GermSpec back = germ_from_json(j);
    REQUIRE(back.d() == 2);
    REQUIRE(back.k == 1);
    REQUIRE(back.l == 6);
    REQUIRE(back.tail.coeff(MultiIndex{3, 3}, 0) == Cx{1e-2, -2e-3});
    CVec z{Cx{0.03, 0.01}, Cx{0.02, -0.01}};
    CVec a = g.evaluate(z), b = back.evaluate(z);
    REQUIRE(std::abs(a[0] - b[0]) < 1e-16);
    REQUIRE(std::abs(a[1] - b[1]) < 1e-16);
}
