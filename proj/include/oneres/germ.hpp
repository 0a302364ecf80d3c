#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "complex_util.hpp"
#include "errors.hpp"
#include "series.hpp"

namespace oneres {

/// Unit-modulus diagonal part with the one-resonance certificate.
/// Angles are in turns: lambda_j = e^{2 pi i angles[j]}.
struct Multipliers {
    int d = 2;
    int k = 1;
    std::vector<double> angles;
    int resonance_scan_degree = 50;
    bool test_mode = false;  // oracle-only: permits roots of unity, skips the scan

    Cx lambda(int j) const { return unit_phase(angles[j]); }
    CVec lambdas() const {
        CVec v(d);
        for (int j = 0; j < d; ++j) v[j] = lambda(j);
        return v;
    }
    /// |lambda^alpha - lambda_i|, computed from reduced phases.
    double divisor(const MultiIndex& alpha, int i) const {
        long double ph = 0;
        for (int j = 0; j < d; ++j) ph += static_cast<long double>(alpha[j]) * angles[j];
        return unit_gap(static_cast<double>(ph), angles[i]);
    }
    Cx lambda_pow(const MultiIndex& alpha) const {
        long double ph = 0;
        for (int j = 0; j < d; ++j) ph += static_cast<long double>(alpha[j]) * angles[j];
        return unit_phase(static_cast<double>(std::fmod(ph, 1.0L)));
    }
    /// lambda_j^n for possibly large |n| without phase drift.
    Cx lambda_pow_int(int j, long long n) const {
        long double ph = std::fmod(static_cast<long double>(n) * angles[j], 1.0L);
        return unit_phase(static_cast<double>(ph));
    }
};

namespace detail {

inline bool near_integer(long double x, double tol) {
    long double f = std::fabs(x - std::roundl(x));
    return f < tol;
}

}  // namespace detail

/// Checks that the only multiplicative relations lambda^m = lambda_j with
/// |m| <= scan_degree are m = q(1,...,1) + e_j. Throws otherwise.
inline void resonance_scan(const std::vector<double>& angles, int scan_degree,
                           double tol = 1e-9) {
    const int d = static_cast<int>(angles.size());
    // roots of unity: q * theta_j integer for some q <= scan_degree
    for (int j = 0; j < d; ++j)
        for (int q = 1; q <= scan_degree; ++q)
            if (detail::near_integer(static_cast<long double>(q) * angles[j], tol))
                throw RootOfUnity("multiplier " + std::to_string(j + 1) +
                                  " is a root of unity of order <= " + std::to_string(q));
    for_each_index(d, 0, scan_degree, [&](const MultiIndex& m) {
        long double ph = 0;
        for (int i = 0; i < d; ++i) ph += static_cast<long double>(m[i]) * angles[i];
        for (int j = 0; j < d; ++j) {
            if (!detail::near_integer(ph - angles[j], tol)) continue;
            // must be m = q*(1,..,1) + e_j
            int q = m[j] - 1;
            bool ok = q >= 0;
            for (int i = 0; ok && i < d; ++i)
                if (m[i] != q + (i == j ? 1 : 0)) ok = false;
            if (!ok)
                throw ExtraResonance("lambda^" + m.str() + " = lambda_" + std::to_string(j + 1));
        }
    });
}

/// Default angle recipe: d=2 uses (sqrt 2, -sqrt 2); d>2 uses frac(sqrt p_j)
/// for the first d-1 primes and the balancing last angle.
inline std::vector<double> prime_sqrt_angles(int d) {
    static const int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31};
    std::vector<double> a(d);
    if (d == 2) {
        a[0] = std::sqrt(2.0);
        a[1] = -std::sqrt(2.0);
        return a;
    }
    double sum = 0;
    for (int j = 0; j + 1 < d; ++j) {
        double s = std::sqrt(static_cast<double>(primes[j]));
        a[j] = s - std::floor(s);
        sum += a[j];
    }
    a[d - 1] = -sum;
    return a;
}

inline Multipliers make_multipliers(int d, std::vector<double> angles, int k = 1,
                                    int scan_degree = 50, bool test_mode = false) {
    if (d < 2) throw ConfigInvalid("multipliers need d >= 2");
    if (static_cast<int>(angles.size()) != d) throw DimensionMismatch("angle count != d");
    long double s = 0;
    for (double a : angles) s += a;
    if (!detail::near_integer(s, 1e-9))
        throw ConfigInvalid("angle sum must be an integer (lambda_1...lambda_d = 1)");
    if (!test_mode) resonance_scan(angles, scan_degree);
    return Multipliers{d, k, std::move(angles), scan_degree, test_mode};
}

inline Multipliers make_multipliers(int d, int k = 1, int scan_degree = 50) {
    return make_multipliers(d, prime_sqrt_angles(d), k, scan_degree);
}

/// Germ F(z) = Lambda z (1 - u^k/(kd)) + tail, u = z^1...z^d, tail = O(|z|^l).
struct GermSpec {
    Multipliers mult;
    int k = 1;
    int l = 0;          // declared tail order; ignored when the tail is empty
    SeriesMap tail;     // all monomials of total degree >= l

    int d() const { return mult.d; }
    bool tail_free() const { return tail.c.empty(); }

    CVec evaluate(std::span<const Cx> z) const {
        const int dd = d();
        Cx u = 1.0;
        for (int j = 0; j < dd; ++j) u *= z[j];
        Cx uk = 1.0;
        for (int i = 0; i < k; ++i) uk *= u;
        Cx f = 1.0 - uk / static_cast<double>(k * dd);
        CVec out(dd);
        for (int j = 0; j < dd; ++j) out[j] = mult.lambda(j) * z[j] * f;
        if (!tail.c.empty()) {
            CVec t = oneres::evaluate(tail, z);
            for (int j = 0; j < dd; ++j) out[j] += t[j];
        }
        return out;
    }
    CVec evaluate(const CVec& z) const { return evaluate(std::span<const Cx>(z)); }

    /// u' after one step, exact polynomial arithmetic on the point.
    Cx step_u(std::span<const Cx> z) const {
        CVec w = evaluate(z);
        Cx u = 1.0;
        for (int j = 0; j < d(); ++j) u *= w[j];
        return u;
    }

    SeriesMap to_series(int cap) const {
        const int dd = d();
        SeriesMap m(dd, cap);
        MultiIndex kalpha = MultiIndex::constant(dd, k);
        for (int j = 0; j < dd; ++j) {
            m.set(MultiIndex::unit(dd, j), j, mult.lambda(j));
            MultiIndex res = kalpha + MultiIndex::unit(dd, j);
            if (res.degree() <= cap)
                m.set(res, j, -mult.lambda(j) / static_cast<double>(k * dd));
        }
        for (const auto& [a, v] : tail.c)
            if (a.degree() <= cap)
                for (int j = 0; j < dd; ++j) m.add(a, j, v[j]);
        return m;
    }
};

inline GermSpec make_normal_form(const Multipliers& mult, int k) {
    if (k < 1) throw ConfigInvalid("resonance order k must be >= 1");
    GermSpec g;
    g.mult = mult;
    g.mult.k = k;
    g.k = k;
    g.l = 2 * k * mult.d + 2;  // nominal; an empty tail is O(|z|^m) for every m
    g.tail = SeriesMap(mult.d, 0);
    g.tail.vars = mult.d;
    return g;
}

inline GermSpec make_perturbed(const GermSpec& base, const SeriesMap& tail, int l) {
    if (l <= 2 * base.k * base.d() + 1)
        throw ConfigInvalid("tail order l must exceed 2kd+1");
    for (const auto& [a, v] : tail.c)
        if (a.degree() < l)
            throw TailTooLow("tail monomial " + a.str() + " has degree " +
                             std::to_string(a.degree()) + " < l = " + std::to_string(l));
    GermSpec g = base;
    g.l = l;
    g.tail = tail;
    g.tail.vars = base.d();
    return g;
}

}  // namespace oneres
