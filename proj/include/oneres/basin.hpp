#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "complex_util.hpp"
#include "errors.hpp"
#include "germ.hpp"
#include "sampling.hpp"

namespace oneres {

/// Parameters of the local basin B_h(R, theta, beta) and its image
/// T(R, theta, beta) in the (U, z') coordinates.
struct BasinParams {
    int d = 2;
    int k = 1;
    int h = 0;           // sector index, 0..k-1
    double R = 16.0;     // > 0
    double theta = 0.3;  // in (0, pi/(2k))
    double beta = 0.4;   // in (0, 1/d)

    void validate() const {
        if (d < 2 || k < 1 || h < 0 || h >= k) throw ConfigInvalid("basin: bad d/k/h");
        if (!(R > 0)) throw ConfigInvalid("basin: R must be positive");
        if (!(theta > 0 && theta < std::numbers::pi / (2.0 * k)))
            throw ConfigInvalid("basin: theta must lie in (0, pi/(2k))");
        if (!(beta > 0 && beta < 1.0 / d)) throw ConfigInvalid("basin: beta must lie in (0, 1/d)");
    }
    BasinParams with_h(int hh) const {
        BasinParams p = *this;
        p.h = hh;
        return p;
    }
    /// Thm-style constraint coupling beta to the tail order.
    static void require_admissible(const GermSpec& germ, double beta) {
        if (germ.tail_free()) return;  // exact normal form: every order works
        if (!(beta * (germ.l + germ.d() - 1) > 2.0 * germ.k + 1))
            throw ConfigInvalid("beta(l+d-1) > 2k+1 fails: beta too small for this tail order");
    }
};

enum class BasinReason { In, Sector, Domination, ProductFloor, SupCap };

struct BasinVerdict {
    bool in = false;
    BasinReason reason = BasinReason::In;
    int which = -1;      // coordinate for Domination
    double margin = 0;   // slack of the first failed (or tightest passed) inequality
    std::string detail;
    explicit operator bool() const { return in; }
};

/// Membership in B_h(R, theta, beta): u^k inside the petal disc, arg u in the
/// sector branch nearest 2 pi h / k, and |z^j| < |u|^beta for every j.
inline BasinVerdict in_basin(std::span<const Cx> z, const BasinParams& p) {
    Cx u = 1.0;
    for (int j = 0; j < p.d; ++j) u *= z[j];
    if (u == Cx{}) return {false, BasinReason::Sector, -1, 0.0, "u = 0"};
    Cx uk = 1.0;
    for (int i = 0; i < p.k; ++i) uk *= u;
    double disc = 1.0 / (2.0 * p.R) - std::abs(uk - 1.0 / (2.0 * p.R));
    if (disc <= 0) return {false, BasinReason::Sector, -1, disc, "petal disc"};
    // difference first, then one wrap to (-pi, pi]: no branch-cut artifact at
    // the sector edges, and distinct sectors stay distinct
    double delta = wrap_pi(std::arg(u) - 2.0 * std::numbers::pi * p.h / p.k);
    double ang = p.theta - std::abs(delta);
    if (ang <= 0) return {false, BasinReason::Sector, -1, ang, "sector angle"};
    double ub = std::pow(std::abs(u), p.beta);
    double worst = 1e300;
    for (int j = 0; j < p.d; ++j) {
        double m = ub - std::abs(z[j]);
        if (m <= 0)
            return {false, BasinReason::Domination, j, m,
                    "|z^" + std::to_string(j + 1) + "| >= |u|^beta"};
        worst = std::min(worst, m);
    }
    return {true, BasinReason::In, -1, std::min({disc, ang, worst}), ""};
}
inline BasinVerdict in_basin(const CVec& z, const BasinParams& p) {
    return in_basin(std::span<const Cx>(z), p);
}

/// Membership in T(R, theta, beta): Re U > R, |arg U| < k theta,
/// |U|^{(beta-1)/k} < |z^2...z^d|, and ||z'||_inf < |U|^{-beta/k}.
inline BasinVerdict in_T(Cx U, std::span<const Cx> zprime, const BasinParams& p) {
    double re = U.real() - p.R;
    if (re <= 0) return {false, BasinReason::Sector, -1, re, "Re U <= R"};
    double ang = p.k * p.theta - std::abs(std::arg(U));
    if (ang <= 0) return {false, BasinReason::Sector, -1, ang, "arg U"};
    double prod = 1.0;
    double sup = 0.0;
    for (const Cx& v : zprime) {
        prod *= std::abs(v);
        sup = std::max(sup, std::abs(v));
    }
    double aU = std::abs(U);
    double floor_m = prod - std::pow(aU, (p.beta - 1.0) / p.k);
    if (floor_m <= 0) return {false, BasinReason::ProductFloor, -1, floor_m, "|z^2...z^d| floor"};
    double cap_m = std::pow(aU, -p.beta / p.k) - sup;
    if (cap_m <= 0) return {false, BasinReason::SupCap, -1, cap_m, "||z'|| cap"};
    return {true, BasinReason::In, -1, std::min({re, ang, floor_m, cap_m}), ""};
}

/// Annulus confining |z^j| given u and z^2..z^{j-1} (prefix), j = 2 + prefix size:
/// ( |u|^{1-(d-j+1)beta} / |z^2...z^{j-1}| , |u|^beta ).
inline std::pair<double, double> annulus_bounds(Cx u, std::span<const Cx> prefix,
                                                const BasinParams& p) {
    if (u == Cx{}) throw ConfigInvalid("annulus_bounds: u = 0");
    int j = 2 + static_cast<int>(prefix.size());
    double denom = 1.0;
    for (const Cx& v : prefix) denom *= std::abs(v);
    double au = std::abs(u);
    double lower = std::pow(au, 1.0 - (p.d - j + 1) * p.beta) / denom;
    double upper = std::pow(au, p.beta);
    if (lower >= upper)
        throw EmptyAnnulus("annulus for z^" + std::to_string(j) + " is empty");
    return {lower, upper};
}

/// Quasi-random point of B_h(R, theta, beta): u is placed in the petal with
/// log-uniform modulus under the sector ceiling, then z^2..z^d walk the
/// nested annuli and z^1 closes the product. Low-discrepancy in every
/// coordinate so the boundary-adjacent region is covered.
inline CVec sample_basin_point(const BasinParams& p, std::uint64_t index, double depth_octaves = 6.0,
                               std::uint64_t scramble = 0) {
    static const unsigned bases[] = {2, 3, 5, 7, 11, 13, 17, 19, 23};
    int bi = 0;
    auto next = [&]() { return halton(index + 1 + scramble, bases[bi++]); };
    double delta = (2.0 * next() - 1.0) * p.theta;
    // |u|^k stays below cos(k delta)/R, the exact petal ceiling at this angle
    double ceil_uk = std::cos(p.k * delta) / p.R;
    double t = next();
    double auk = ceil_uk * std::exp2(-depth_octaves * t - 1e-3);
    double au = std::pow(auk, 1.0 / p.k);
    double aru = 2.0 * std::numbers::pi * p.h / p.k + delta / p.k;
    Cx u = au * unit_phase(aru / (2.0 * std::numbers::pi));
    CVec z(p.d);
    double prefix = 1.0;
    Cx prefix_c = 1.0;
    for (int j = 2; j <= p.d; ++j) {
        double lower = std::pow(au, 1.0 - (p.d - j + 1) * p.beta) / prefix;
        double upper = std::pow(au, p.beta);
        double s = next();
        double mod = lower * std::pow(upper / lower, 0.02 + 0.96 * s);
        double ang = 2.0 * std::numbers::pi * next();
        z[j - 1] = mod * unit_phase(ang / (2.0 * std::numbers::pi));
        prefix *= mod;
        prefix_c *= z[j - 1];
    }
    z[0] = u / prefix_c;
    return z;
}

struct R0Certificate {
    double R0 = 0;
    double theta = 0, beta = 0;
    int samples = 0;
    std::vector<double> min_margin_per_h;   // basin-membership slack of the images
    double drift_worst = 0;                 // max |U(F z) - U(z) - 1|
    std::vector<double> tested_R;
    bool passed = false;
};

/// Doubling search for an invariance radius: the smallest tested R such that
/// `samples` quasi-random points of every B_h(R, theta, beta) map back into
/// the same basin with |U(F z) - U(z) - 1| < 1/2.
inline R0Certificate find_R0(const GermSpec& germ, double theta, double beta, int samples,
                             double R_init = 1.0, double R_max = 1e12) {
    if (!(theta > 0 && theta < std::numbers::pi / (2.0 * germ.k)))
        throw ConfigInvalid("find_R0: theta out of (0, pi/(2k))");
    if (!(beta > 0 && beta < 1.0 / germ.d())) throw ConfigInvalid("find_R0: beta out of (0, 1/d)");
    BasinParams::require_admissible(germ, beta);
    R0Certificate cert;
    cert.theta = theta;
    cert.beta = beta;
    cert.samples = samples;
    for (double R = R_init; R <= R_max; R *= 2.0) {
        cert.tested_R.push_back(R);
        bool ok = true;
        std::vector<double> margins(germ.k, 1e300);
        double drift_worst = 0;
        for (int h = 0; ok && h < germ.k; ++h) {
            BasinParams p{germ.d(), germ.k, h, R, theta, beta};
            for (int s = 0; s < samples; ++s) {
                CVec z = sample_basin_point(p, static_cast<std::uint64_t>(s));
                if (!in_basin(z, p)) continue;  // clipped by rounding at the edge
                CVec w = germ.evaluate(z);
                BasinVerdict v = in_basin(w, p);
                if (!v) {
                    ok = false;
                    break;
                }
                margins[h] = std::min(margins[h], v.margin);
                Cx u1 = 1.0, u2 = 1.0;
                for (int j = 0; j < p.d; ++j) {
                    u1 *= z[j];
                    u2 *= w[j];
                }
                Cx uk1 = 1.0, uk2 = 1.0;
                for (int i = 0; i < p.k; ++i) {
                    uk1 *= u1;
                    uk2 *= u2;
                }
                Cx U1 = 1.0 / uk1, U2 = 1.0 / uk2;
                double drift = std::abs(U2 - U1 - 1.0);
                drift_worst = std::max(drift_worst, drift);
                if (drift >= 0.5) {
                    ok = false;
                    break;
                }
            }
        }
        if (ok) {
            cert.R0 = R;
            cert.min_margin_per_h = margins;
            cert.drift_worst = drift_worst;
            cert.passed = true;
            return cert;
        }
    }
    throw SearchExhausted("find_R0: no radius up to 1e12 passed the sampled invariance test");
}

/// Figure-style polar decomposition datasets (d = 2): modulus region points
/// r1^{(1-beta)/beta} < r2 < r1^{beta/(1-beta)} and argument ribbon points
/// d_{S^1}(s + t, 2 pi h / k) < theta.
struct PolarDataset {
    std::vector<std::pair<double, double>> moduli;            // (r1, r2)
    std::vector<std::tuple<double, double, int>> arguments;   // (s, t, h)
};

inline PolarDataset polar_sample(const BasinParams& p, int n, std::uint64_t seed = 1) {
    PolarDataset out;
    if (p.d != 2) throw ConfigInvalid("polar_sample: modulus table is the d = 2 dataset");
    for (int i = 0; i < n; ++i) {
        double x = halton(seed + i, 2), y = halton(seed + i, 3);
        double r1 = std::exp2(-8.0 * x - 0.75);
        double lo = std::pow(r1, (1.0 - p.beta) / p.beta);
        double hi = std::pow(r1, p.beta / (1.0 - p.beta));
        double r2 = lo * std::pow(hi / lo, 0.01 + 0.98 * y);
        out.moduli.emplace_back(r1, r2);
    }
    for (int h = 0; h < p.k; ++h) {
        for (int i = 0; i < n; ++i) {
            double s = 2.0 * std::numbers::pi * halton(seed + i, 5);
            double eps = (2.0 * halton(seed + i, 7) - 1.0) * p.theta * 0.999;
            double t = 2.0 * std::numbers::pi * h / p.k + eps - s;
            t = std::fmod(t, 2.0 * std::numbers::pi);
            if (t < 0) t += 2.0 * std::numbers::pi;
            out.arguments.emplace_back(s, t, h);
        }
    }
    return out;
}

}  // namespace oneres
