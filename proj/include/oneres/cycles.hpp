#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "basin.hpp"
#include "complex_util.hpp"
#include "errors.hpp"
#include "germ.hpp"
#include "sampling.hpp"
#include "series.hpp"

namespace oneres {

/// Root germ F_p(z) = M_p z (1 + a z^{k alpha} + b z^{2k alpha}) whose p-th
/// iterate matches F_0 = Lambda z (1 + c z^{k alpha}) through O(z^{3k alpha}).
struct RootGermSpec {
    GermSpec base;                 // F_0, with c = -1/(kd)
    int p = 1;
    std::vector<double> mu_angles; // mu_j = e^{2 pi i mu_angles[j]}, M_p^p = Lambda
    Cx a{}, b{};

    int d() const { return base.d(); }
    int k() const { return base.k; }
    Cx mu(int j) const { return unit_phase(mu_angles[j]); }

    SeriesMap to_series(int cap) const {
        const int dd = d();
        SeriesMap m(dd, cap);
        MultiIndex kalpha = MultiIndex::constant(dd, k());
        MultiIndex kalpha2 = MultiIndex::constant(dd, 2 * k());
        for (int j = 0; j < dd; ++j) {
            Cx mj = mu(j);
            m.set(MultiIndex::unit(dd, j), j, mj);
            MultiIndex i1 = kalpha + MultiIndex::unit(dd, j);
            MultiIndex i2 = kalpha2 + MultiIndex::unit(dd, j);
            if (i1.degree() <= cap) m.set(i1, j, mj * a);
            if (i2.degree() <= cap) m.set(i2, j, mj * b);
        }
        return m;
    }

    CVec evaluate(const CVec& z) const {
        const int dd = d();
        Cx u = 1.0;
        for (int j = 0; j < dd; ++j) u *= z[j];
        Cx uk = 1.0;
        for (int i = 0; i < k(); ++i) uk *= u;
        Cx f = 1.0 + a * uk + b * uk * uk;
        CVec out(dd);
        for (int j = 0; j < dd; ++j) out[j] = mu(j) * z[j] * f;
        return out;
    }
};

/// Builds M_p and the second-order correction of the lemma:
/// a = c/p, b = -((p-1)/2) a^2 (k|alpha| + 1) with |alpha| = d.
/// mu_j = e^{2 pi i (theta_j + m_j)/p} where the integer offsets solve
/// sum(theta_j + m_j)/p = 1/p (mod 1) with the smallest |m_j| (carried by
/// the last coordinate for reproducibility).
inline RootGermSpec make_root_germ(const GermSpec& base, int p) {
    const int k = base.k, d = base.d();
    if (p < 1 || k % p != 0) throw NotADivisor("make_root_germ: p must divide k");
    RootGermSpec r;
    r.base = base;
    r.p = p;
    const double c = -1.0 / (k * d);
    r.a = Cx{c / p, 0.0};
    double aa = c / p;
    r.b = Cx{-0.5 * (p - 1) * aa * aa * (k * d + 1), 0.0};
    r.mu_angles.resize(d);
    long double s = 0;
    for (int j = 0; j < d; ++j) s += base.mult.angles[j];
    long long ssum = static_cast<long long>(std::llroundl(s));
    // need ssum + sum(m_j) = 1 (mod p)
    long long need = ((1 - ssum) % p + p) % p;
    if (need > p / 2) need -= p;  // representative of smallest magnitude
    for (int j = 0; j < d; ++j) {
        double m = (j == d - 1) ? static_cast<double>(need) : 0.0;
        r.mu_angles[j] = (base.mult.angles[j] + m) / p;
    }
    return r;
}

struct RootVerification {
    double max_deviation = 0;   // vs F_0 over all |idx| <= 3kd - 1
    int degree_checked = 0;
    // closed-form iterate coefficients a_m = m a, b_m = m b + (m(m-1)/2) a^2 (kd+1)
    std::vector<double> iterate_coeff_err;  // m = 2..p
    double mu_constraint_err = 0;           // |mu_j^p/lambda_j - 1| and |prod mu / zeta_p - 1|
};

/// Composes the root germ with itself p times and compares against F_0
/// coefficient-wise below the O(z^{3k alpha}) error order.
inline RootVerification verify_root(const RootGermSpec& root, int cap = -1) {
    const int d = root.d(), k = root.k(), p = root.p;
    const int check_deg = 3 * k * d - 1;
    if (cap < 0) cap = check_deg;
    RootVerification rep;
    rep.degree_checked = std::min(cap, check_deg);
    SeriesMap Fp = root.to_series(cap);
    SeriesMap acc = Fp;
    MultiIndex kalpha = MultiIndex::constant(d, k);
    MultiIndex kalpha2 = MultiIndex::constant(d, 2 * k);
    for (int m = 2; m <= p; ++m) {
        acc = compose(Fp, acc, cap);
        // intermediate iterate coefficients vs the closed forms
        Cx am_expect = static_cast<double>(m) * root.a;
        Cx bm_expect = static_cast<double>(m) * root.b +
                       0.5 * m * (m - 1) * root.a * root.a *
                           static_cast<double>(k * d + 1);
        double err = 0;
        for (int j = 0; j < d; ++j) {
            Cx mj_m = unit_phase(root.mu_angles[j] * m);
            MultiIndex i1 = kalpha + MultiIndex::unit(d, j);
            MultiIndex i2 = kalpha2 + MultiIndex::unit(d, j);
            if (i1.degree() <= cap) err = std::max(err, std::abs(acc.coeff(i1, j) / mj_m - am_expect));
            if (i2.degree() <= cap) err = std::max(err, std::abs(acc.coeff(i2, j) / mj_m - bm_expect));
        }
        rep.iterate_coeff_err.push_back(err);
    }
    SeriesMap F0 = root.base.to_series(cap);
    for (const auto& [idx, v] : acc.c) {
        if (idx.degree() > rep.degree_checked) continue;
        for (int j = 0; j < d; ++j)
            rep.max_deviation = std::max(rep.max_deviation, std::abs(v[j] - F0.coeff(idx, j)));
    }
    for (const auto& [idx, v] : F0.c) {
        if (idx.degree() > rep.degree_checked) continue;
        for (int j = 0; j < d; ++j)
            rep.max_deviation = std::max(rep.max_deviation, std::abs(v[j] - acc.coeff(idx, j)));
    }
    for (int j = 0; j < d; ++j) {
        Cx mup = unit_phase(root.mu_angles[j] * p);
        rep.mu_constraint_err =
            std::max(rep.mu_constraint_err, std::abs(mup / root.base.mult.lambda(j) - 1.0));
    }
    long double prod = 0;
    for (double ang : root.mu_angles) prod += ang;
    Cx mu_prod = unit_phase(static_cast<double>(std::fmod(prod, 1.0L)));
    Cx zeta_p = unit_phase(1.0 / p);
    rep.mu_constraint_err = std::max(rep.mu_constraint_err, std::abs(mu_prod / zeta_p - 1.0));
    return rep;
}

struct PermutationReport {
    std::vector<int> image_of;      // h -> h'
    std::vector<double> success;    // fraction of samples landing in B_{h+k/p}
    int expected_shift = 0;         // k/p
    bool matches_shift = true;
    int samples = 0;
};

/// Samples points near z_r = (r, .., zeta_k^h r) inside each B_h of the base
/// germ and verifies the root germ maps them into B_{h + k/p mod k}.
inline PermutationReport basin_permutation_check(const RootGermSpec& root, double r, int samples,
                                                 const BasinParams& certified,
                                                 std::uint64_t seed = 5) {
    const int d = root.d(), k = root.k(), p = root.p;
    PermutationReport rep;
    rep.expected_shift = k / p;
    rep.samples = samples;
    rep.image_of.assign(k, -1);
    rep.success.assign(k, 0.0);
    Rng rng(seed);
    for (int h = 0; h < k; ++h) {
        BasinParams ph = certified.with_h(h);
        int hit = 0, total = 0;
        int want = (h + k / p) % k;
        for (int s = 0; s < samples; ++s) {
            CVec z(d);
            for (int j = 0; j < d; ++j) {
                double mod = r * (1.0 + 0.05 * rng.uniform(-1.0, 1.0));
                double ang = rng.uniform(-0.5, 0.5) * certified.theta / (2.0 * d);
                if (j == d - 1) ang += 2.0 * std::numbers::pi * h / k;
                z[j] = mod * unit_phase(ang / (2.0 * std::numbers::pi));
            }
            if (!in_basin(z, ph)) continue;
            ++total;
            CVec w = root.evaluate(z);
            int landed = -1;
            for (int hh = 0; hh < k; ++hh)
                if (in_basin(w, certified.with_h(hh))) {
                    landed = hh;
                    break;
                }
            if (landed == want) ++hit;
            if (rep.image_of[h] == -1 && landed >= 0) rep.image_of[h] = landed;
        }
        rep.success[h] = total > 0 ? static_cast<double>(hit) / total : 0.0;
    }
    for (int h = 0; h < k; ++h)
        if (rep.image_of[h] != (h + k / p) % k || rep.success[h] < 1.0) rep.matches_shift = false;
    return rep;
}

/// Product extension (z, w) -> (F(z), w/2) in d + extra variables.
struct ExtendedGerm {
    SeriesMap map;
    int base_d = 0;
    int extra = 0;
    CVec evaluate(const CVec& zw, const GermSpec& base) const {
        CVec z(zw.begin(), zw.begin() + base_d);
        CVec f = base.evaluate(z);
        CVec out(base_d + extra);
        for (int j = 0; j < base_d; ++j) out[j] = f[j];
        for (int j = 0; j < extra; ++j) out[base_d + j] = 0.5 * zw[base_d + j];
        return out;
    }
};

inline ExtendedGerm product_extension(const GermSpec& germ, int extra, int cap) {
    if (extra < 1) throw ConfigInvalid("product_extension: extra must be >= 1");
    const int d = germ.d(), D = d + extra;
    ExtendedGerm out;
    out.base_d = d;
    out.extra = extra;
    out.map = SeriesMap(D, cap);
    SeriesMap base = germ.to_series(cap);
    for (const auto& [idx, v] : base.c) {
        MultiIndex wide(D);
        for (int j = 0; j < d; ++j) wide[j] = idx[j];
        for (int j = 0; j < d; ++j) out.map.set(wide, j, v[j]);
    }
    for (int j = 0; j < extra; ++j)
        out.map.set(MultiIndex::unit(D, d + j), d + j, 0.5);
    return out;
}

}  // namespace oneres
