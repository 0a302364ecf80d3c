#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "oneres/basin.hpp"
#include "oneres/fatou.hpp"

using namespace oneres;
using Catch::Approx;

namespace {

struct Fixture {
    GermSpec g;
    BasinParams p;
    Fixture() {
        g = make_normal_form(make_multipliers(2, 1, 50), 1);
        R0Certificate cert = find_R0(g, 0.3, 0.4, 500);
        p = BasinParams{2, 1, 0, cert.R0, 0.3, 0.4};
    }
};

Fixture& fixture() {
    static Fixture f;
    return f;
}

}  // namespace

TEST_CASE("psi solves the Abel equation") {
    auto& [g, p] = fixture();
    CVec z{Cx{0.01, 0.0}, Cx{0.01, 0.0}};
    REQUIRE(in_basin(z, p).in);
    FatouEvaluation a = fatou_psi(g, z, p, 200000, 1e-9);
    FatouEvaluation b = fatou_psi(g, g.evaluate(z), p, 200000, 1e-9);
    REQUIRE(std::abs(b.value - a.value - 1.0) < 1e-8);
    REQUIRE(a.value.real() > 0.0);
    REQUIRE(a.branch.clean());
}

TEST_CASE("psi is asymptotic to U on deep points") {
    auto& [g, p] = fixture();
    for (double r : {0.008, 0.005, 0.003}) {
        CVec z{Cx{r, 0.0}, Cx{r, 0.0}};
        Cx U = 1.0 / (z[0] * z[1]);
        if (U.real() < 1e4) continue;
        FatouEvaluation a = fatou_psi(g, z, p, 400000, 1e-9);
        REQUIRE(std::abs(a.value / U - 1.0) < 0.01);
    }
}

TEST_CASE("drift regression recovers c = -3/4 for k=1, d=2") {
    auto& [g, p] = fixture();
    CVec z{Cx{0.05, 0.0}, Cx{0.05, 0.0}};
    // regress U_n - n against log U_n over n in [1e3, 1e5]: the slope is -c
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    long count = 0;
    CVec w = z;
    long next = 1000;
    for (long n = 0; n <= 100000; ++n) {
        if (n == next) {
            next = static_cast<long>(next * 1.05) + 1;
            Cx U = 1.0 / (w[0] * w[1]);
            double x = std::log(std::abs(U));
            double y = (U - static_cast<double>(n)).real();
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            ++count;
        }
        w = g.evaluate(w);
    }
    double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
    double c_fit = -slope;
    REQUIRE(c_fit == Approx(fatou_drift_constant(1, 2)).margin(1e-3));
    REQUIRE(fatou_drift_constant(1, 2) == -0.75);
    REQUIRE(fatou_drift_constant(2, 2) == Approx(-5.0 / 8.0));
}

TEST_CASE("psi error estimate shrinks with depth") {
    auto& [g, p] = fixture();
    CVec z{Cx{0.02, 0.0}, Cx{0.02, 0.0}};
    FatouEvaluation coarse = fatou_psi(g, z, p, 200000, 1e-6);
    FatouEvaluation fine = fatou_psi(g, z, p, 200000, 1e-10);
    REQUIRE(fine.depth > coarse.depth);
    REQUIRE(fine.est_error < coarse.est_error);
}

TEST_CASE("sigma functional equation and asymptotics") {
    auto& [g, p] = fixture();
    CVec z{Cx{0.012, 0.002}, Cx{0.011, -0.004}};
    REQUIRE(in_basin(z, p).in);
    CVec w = g.evaluate(z);
    FatouEvaluation psi_z = fatou_psi(g, z, p, 400000, 1e-10);
    FatouEvaluation psi_w = fatou_psi(g, w, p, 400000, 1e-10);
    SECTION("sigma_2(F z) = lambda_2 sigma_2(z) (psi/(psi+1))^{1/kd}") {
        FatouEvaluation s_z = fatou_sigma(g, z, 2, p, 400000, 1e-10, &psi_z);
        FatouEvaluation s_w = fatou_sigma(g, w, 2, p, 400000, 1e-10, &psi_w);
        BranchLog b;
        Cx root = detail::principal_root(psi_z.value / (psi_z.value + 1.0), 2, b);
        REQUIRE(std::abs(s_w.value - g.mult.lambda(1) * s_z.value * root) < 1e-7);
    }
    SECTION("sigma_1 satisfies the same equation") {
        FatouEvaluation s_z = fatou_sigma1(g, z, p, 400000, 1e-10);
        FatouEvaluation s_w = fatou_sigma1(g, w, p, 400000, 1e-10);
        BranchLog b;
        Cx root = detail::principal_root(psi_z.value / (psi_z.value + 1.0), 2, b);
        REQUIRE(std::abs(s_w.value - g.mult.lambda(0) * s_z.value * root) < 1e-7);
    }
    SECTION("sigma_2 - z^2 decays like u^alpha with alpha above 1 - beta") {
        // r large enough that the u^alpha signal dominates the truncation
        // tail (~ depth x last increment) of the limit approximant
        std::vector<double> xs, ys;
        for (double r : {0.05, 0.035, 0.025}) {
            CVec zr{Cx{r, 0.0}, Cx{r, 0.0}};
            if (!in_basin(zr, p).in) continue;
            FatouEvaluation pr = fatou_psi(g, zr, p, 400000, 1e-11);
            FatouEvaluation s = fatou_sigma(g, zr, 2, p, 400000, 1e-11, &pr);
            double diff = std::abs(s.value - Cx{r, 0.0});
            REQUIRE(diff < std::pow(r, 2.0 * 0.9));  // inequality form at alpha = 0.9, C = 1
            xs.push_back(std::log(r));
            ys.push_back(std::log(diff));
        }
        REQUIRE(xs.size() >= 3);
        double n = xs.size(), sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            sx += xs[i];
            sy += ys[i];
            sxx += xs[i] * xs[i];
            sxy += xs[i] * ys[i];
        }
        double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        double alpha = slope / 2.0;  // u = r^2 along the diagonal
        REQUIRE(alpha > 1.0 - p.beta);
        // the symmetric-start cancellation pushes the observed exponent past
        // k = 1 (the claim is one-sided); anything wildly larger is a bug
        REQUIRE(alpha < 2.5);
    }
    SECTION("sigma increments are Cauchy; est_error tracks the last increment") {
        FatouEvaluation coarse = fatou_sigma(g, z, 2, p, 400000, 1e-7, &psi_z);
        FatouEvaluation fine = fatou_sigma(g, z, 2, p, 400000, 1e-10, &psi_z);
        REQUIRE(fine.est_error < coarse.est_error);
        REQUIRE(fine.depth > coarse.depth);
        // the absolute tail behind a last increment of size e at depth n is
        // of order (n + |psi|) e for the ~1/n^2 increment decay
        double tail_scale = (coarse.depth + std::abs(psi_z.value)) * coarse.est_error;
        REQUIRE(std::abs(fine.value - coarse.value) < 3.0 * tail_scale);
    }
}

TEST_CASE("tau linearizes the multiplier action") {
    auto& [g, p] = fixture();
    CVec z{Cx{0.015, 0.003}, Cx{0.014, -0.002}};
    CVec w = g.evaluate(z);
    FatouEvaluation psi_z = fatou_psi(g, z, p, 400000, 1e-10);
    FatouEvaluation psi_w = fatou_psi(g, w, p, 400000, 1e-10);
    FatouEvaluation t_z = tau(g, z, 2, p, 400000, 1e-10, &psi_z);
    FatouEvaluation t_w = tau(g, w, 2, p, 400000, 1e-10, &psi_w);
    SECTION("tau(F z) = lambda_2 tau(z)") {
        REQUIRE(std::abs(t_w.value - g.mult.lambda(1) * t_z.value) < 1e-7);
    }
    SECTION("|tau| = |psi|^{1/kd} |sigma|") {
        FatouEvaluation s_z = fatou_sigma(g, z, 2, p, 400000, 1e-10, &psi_z);
        REQUIRE(std::abs(t_z.value) ==
                Approx(std::pow(std::abs(psi_z.value), 0.5) * std::abs(s_z.value)).epsilon(1e-9));
    }
    SECTION("lambda^{-n} tau(z_n) is constant along the orbit") {
        CVec zz = z;
        Cx first;
        for (int n = 0; n <= 1000; ++n) {
            if (n % 250 == 0) {
                FatouEvaluation pn = fatou_psi(g, zz, p, 1000000, 1e-12);
                FatouEvaluation tn = tau(g, zz, 2, p, 1000000, 1e-12, &pn);
                Cx val = g.mult.lambda_pow_int(1, -n) * tn.value;
                if (n == 0)
                    first = val;
                else
                    REQUIRE(std::abs(val - first) < 1e-6);
            }
            zz = g.evaluate(zz);
        }
    }
}

TEST_CASE("cylinder conjugation") {
    Multipliers m = make_multipliers(2, 1, 50);
    SECTION("zeta = 0 is fixed") {
        CylinderPoint p0{Cx{0, 0}, CVec{Cx{0.3, 0.4}}};
        CylinderPoint q = cylinder_conjugation(p0, m);
        REQUIRE(q.xi[0] == p0.xi[0]);
    }
    SECTION("zeta = 1 multiplies by lambda^{-1}") {
        CylinderPoint p1{Cx{1, 0}, CVec{Cx{0.3, 0.4}}};
        CylinderPoint q = cylinder_conjugation(p1, m);
        REQUIRE(std::abs(q.xi[0] - p1.xi[0] / m.lambda(1)) < 1e-12);
    }
    SECTION("intertwining with the rotated translation is exact") {
        CylinderPoint p0{Cx{2.3, -0.7}, CVec{Cx{0.5, -0.2}}};
        CylinderPoint lhs{p0.zeta + 1.0, CVec{m.lambda(1) * p0.xi[0]}};
        CylinderPoint a = cylinder_conjugation(lhs, m);
        CylinderPoint b = cylinder_conjugation(p0, m);
        REQUIRE(std::abs(a.zeta - b.zeta - 1.0) < 1e-12);
        REQUIRE(std::abs(a.xi[0] - b.xi[0]) < 1e-12);
    }
    SECTION("backward undoes forward") {
        CylinderPoint p0{Cx{1.2, 0.4}, CVec{Cx{0.5, -0.2}}};
        CylinderPoint q =
            cylinder_conjugation(cylinder_conjugation(p0, m), m, CylinderDirection::Backward);
        REQUIRE(std::abs(q.xi[0] - p0.xi[0]) < 1e-12);
    }
}

TEST_CASE("global coordinate") {
    auto& [g, p] = fixture();
    SECTION("n = 0 reduces to (psi, tau)") {
        CVec z{Cx{0.012, 0.001}, Cx{0.012, -0.001}};
        REQUIRE(in_basin(z, p).in);
        GlobalCoordinate gc = global_coordinate(g, z, p);
        REQUIRE(gc.entry_n == 0);
        FatouEvaluation psi = fatou_psi(g, z, p, 400000, 1e-10);
        REQUIRE(std::abs(gc.point.zeta - psi.value) < 1e-9);
    }
    SECTION("value is independent of the admissible depth") {
        CVec z{Cx{0.012, 0.001}, Cx{0.012, -0.001}};
        GlobalCoordinate a = global_coordinate(g, z, p, 1000, 400000, 1e-10, 0);
        GlobalCoordinate b = global_coordinate(g, z, p, 1000, 400000, 1e-10, 5);
        REQUIRE(std::abs(a.point.zeta - b.point.zeta) < 1e-6);
        REQUIRE(std::abs(a.point.xi[0] - b.point.xi[0]) < 1e-6);
    }
    SECTION("a start outside every forward iterate of the basin is reported") {
        CVec z{Cx{0.0, 0.0}, Cx{0.05, 0.0}};  // hyperplane orbit never enters
        REQUIRE_THROWS_AS(global_coordinate(g, z, p, 200), NeverEntersBasin);
    }
}

TEST_CASE("injectivity evidence") {
    auto& [g, p] = fixture();
    InjectivityReport rep = check_injectivity(g, p, 200, 11, 1e-10);
    SECTION("no output collisions on the grid") {
        REQUIRE(rep.min_normalized_separation > 1e-6);
    }
    SECTION("chart Jacobian near one") {
        bool found = false;
        for (auto& [r, dev] : rep.jacobian_sweep)
            if (r == 1e-3) {
                REQUIRE(dev < 0.1);
                found = true;
            }
        REQUIRE(found);
    }
    SECTION("a T-target is hit by Newton from the asymptotic inverse") {
        REQUIRE(rep.containment_residual < 1e-8);
    }
}
