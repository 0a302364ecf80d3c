#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "oneres/series.hpp"

using namespace oneres;
using Catch::Approx;

namespace {

ScalarSeries poly1(std::initializer_list<std::pair<int, Cx>> terms) {
    ScalarSeries s(1);
    for (auto& [e, c] : terms) s.set(MultiIndex{e}, c);
    return s;
}

SeriesMap map1(std::initializer_list<std::pair<int, Cx>> terms, int cap) {
    SeriesMap m(1, cap);
    for (auto& [e, c] : terms) m.set(MultiIndex{e}, 0, c);
    return m;
}

SeriesMap random_map(int d, int deg, int cap, std::mt19937_64& gen) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    SeriesMap m(d, cap);
    for (int j = 0; j < d; ++j) m.set(MultiIndex::unit(d, j), j, Cx{1.0 + 0.2 * u(gen), 0.1 * u(gen)});
    for_each_index(d, 2, deg, [&](const MultiIndex& idx) {
        for (int j = 0; j < d; ++j) m.set(idx, j, 0.3 * Cx{u(gen), u(gen)});
    });
    return m;
}

}  // namespace

TEST_CASE("multiply basics") {
    ScalarSeries one = ScalarSeries::one(2);
    ScalarSeries zw(2);
    zw.set(MultiIndex{1, 1}, 1.0);
    SECTION("1 * f = f") {
        ScalarSeries f(2);
        f.set(MultiIndex{2, 0}, Cx{0.5, -1.0});
        f.set(MultiIndex{0, 3}, Cx{0.0, 2.0});
        ScalarSeries p = multiply(one, f, 10);
        REQUIRE(p.c == f.c);
    }
    SECTION("(zw)*(zw) = z^2 w^2") {
        ScalarSeries p = multiply(zw, zw, 10);
        REQUIRE(p.c.size() == 1);
        REQUIRE(p.coeff(MultiIndex{2, 2}) == Cx{1.0, 0.0});
    }
    SECTION("product matches pointwise evaluation at 20 points") {
        std::mt19937_64 gen(42);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        ScalarSeries a(2), b(2);
        for_each_index(2, 0, 4, [&](const MultiIndex& idx) {
            a.set(idx, 0.3 * Cx{u(gen), u(gen)});
            b.set(idx, 0.3 * Cx{u(gen), u(gen)});
        });
        ScalarSeries p = multiply(a, b, 8);
        for (int t = 0; t < 20; ++t) {
            CVec z{0.3 * Cx{u(gen), u(gen)}, 0.3 * Cx{u(gen), u(gen)}};
            Cx lhs = evaluate(p, z);
            Cx rhs = evaluate(a, z) * evaluate(b, z);
            REQUIRE(std::abs(lhs - rhs) < 1e-10);
        }
    }
}

TEST_CASE("compose") {
    SECTION("linear parts multiply") {
        SeriesMap L1 = SeriesMap::linear_diag({Cx{2, 0}, Cx{0, 1}}, 4);
        SeriesMap L2 = SeriesMap::linear_diag({Cx{0.5, 0}, Cx{3, 0}}, 4);
        SeriesMap c = compose(L1, L2, 4);
        REQUIRE(c.coeff(MultiIndex{1, 0}, 0) == Cx{1, 0});
        REQUIRE(c.coeff(MultiIndex{0, 1}, 1) == Cx{0, 3});
    }
    SECTION("(z + z^2) o (z + z^2) = z + 2z^2 + 2z^3 + z^4") {
        SeriesMap f = map1({{1, 1.0}, {2, 1.0}}, 4);
        SeriesMap c = compose(f, f, 4);
        REQUIRE(c.coeff(MultiIndex{1}, 0) == Cx{1, 0});
        REQUIRE(c.coeff(MultiIndex{2}, 0) == Cx{2, 0});
        REQUIRE(c.coeff(MultiIndex{3}, 0) == Cx{2, 0});
        REQUIRE(c.coeff(MultiIndex{4}, 0) == Cx{1, 0});
    }
    SECTION("compose with identity truncates") {
        std::mt19937_64 gen(7);
        SeriesMap f = random_map(2, 4, 6, gen);
        SeriesMap c = compose(f, SeriesMap::identity(2, 6), 3);
        for (const auto& [idx, v] : c.c) REQUIRE(idx.degree() <= 3);
        for (const auto& [idx, v] : f.c)
            if (idx.degree() <= 3)
                for (int j = 0; j < 2; ++j) REQUIRE(c.coeff(idx, j) == v[j]);
    }
    SECTION("constant term rejected") {
        SeriesMap f = map1({{1, 1.0}}, 4);
        SeriesMap g = map1({{0, 0.5}, {1, 1.0}}, 4);
        REQUIRE_THROWS_AS(compose(f, g, 4), NonzeroConstant);
    }
    SECTION("associativity through the cap on random cubic maps") {
        std::mt19937_64 gen(11);
        SeriesMap f = random_map(2, 3, 9, gen);
        SeriesMap g = random_map(2, 3, 9, gen);
        SeriesMap h = random_map(2, 3, 9, gen);
        SeriesMap lhs = compose(compose(f, g, 9), h, 9);
        SeriesMap rhs = compose(f, compose(g, h, 9), 9);
        REQUIRE(max_coeff_diff(lhs, rhs) < 1e-10);
    }
}

TEST_CASE("invert") {
    SECTION("diagonal linear") {
        SeriesMap L = SeriesMap::linear_diag({Cx{2, 0}, Cx{0, 1}}, 3);
        SeriesMap K = invert(L, 3);
        REQUIRE(std::abs(K.coeff(MultiIndex{1, 0}, 0) - Cx{0.5, 0}) < 1e-15);
        REQUIRE(std::abs(K.coeff(MultiIndex{0, 1}, 1) - Cx{0, -1}) < 1e-15);
    }
    SECTION("invert(z + z^2) = z - z^2 + 2z^3 through degree 3") {
        SeriesMap f = map1({{1, 1.0}, {2, 1.0}}, 3);
        SeriesMap K = invert(f, 3);
        REQUIRE(std::abs(K.coeff(MultiIndex{1}, 0) - 1.0) < 1e-14);
        REQUIRE(std::abs(K.coeff(MultiIndex{2}, 0) + 1.0) < 1e-14);
        REQUIRE(std::abs(K.coeff(MultiIndex{3}, 0) - 2.0) < 1e-14);
    }
    SECTION("round trip on random degree-5 maps") {
        std::mt19937_64 gen(5);
        SeriesMap f = random_map(2, 5, 5, gen);
        SeriesMap K = invert(f, 5);
        SeriesMap id = compose(f, K, 5);
        REQUIRE(max_coeff_diff(id, SeriesMap::identity(2, 5)) < 1e-10);
    }
    SECTION("singular linear part") {
        SeriesMap f(2, 3);
        f.set(MultiIndex{1, 0}, 0, 1.0);  // second component has no linear term
        f.set(MultiIndex{0, 2}, 1, 1.0);
        REQUIRE_THROWS_AS(invert(f, 3), SingularLinearPart);
    }
}

TEST_CASE("evaluate_series") {
    SECTION("identity and diagonal") {
        CVec z{Cx{0.3, 0.1}, Cx{-0.2, 0.4}};
        CVec w = evaluate(SeriesMap::identity(2, 3), z);
        REQUIRE(w[0] == z[0]);
        REQUIRE(w[1] == z[1]);
        SeriesMap L = SeriesMap::linear_diag({Cx{2, 0}, Cx{0, 1}}, 3);
        CVec v = evaluate(L, z);
        REQUIRE(std::abs(v[0] - 2.0 * z[0]) < 1e-15);
        REQUIRE(std::abs(v[1] - Cx{0, 1} * z[1]) < 1e-15);
    }
    SECTION("evaluation respects composition up to the cap") {
        std::mt19937_64 gen(3);
        const int D = 4;
        SeriesMap f = random_map(2, 3, D, gen);
        SeriesMap g = random_map(2, 3, D, gen);
        SeriesMap fg = compose(f, g, D);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (int t = 0; t < 25; ++t) {
            CVec z{1e-2 * Cx{u(gen), u(gen)}, 1e-2 * Cx{u(gen), u(gen)}};
            CVec a = evaluate(fg, z);
            CVec b = evaluate(f, evaluate(g, z));
            for (int j = 0; j < 2; ++j)
                REQUIRE(std::abs(a[j] - b[j]) < std::pow(10.0, -2.0 * (D + 1) + 1.0));
        }
    }
    SECTION("compensated mode agrees with plain accumulation") {
        std::mt19937_64 gen(9);
        SeriesMap f = random_map(2, 6, 12, gen);
        SeriesMap g = random_map(2, 6, 12, gen);
        SeriesMap plain = compose(f, g, 12);
        series_compensated_mode() = true;
        SeriesMap comp = compose(f, g, 12);
        series_compensated_mode() = false;
        REQUIRE(max_coeff_diff(plain, comp) < 1e-12);
    }
}
