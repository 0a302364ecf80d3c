#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "complex_util.hpp"
#include "errors.hpp"
#include "exponent_set.hpp"
#include "germ.hpp"

namespace oneres {

struct DivisorWitness {
    MultiIndex alpha;
    int comp = 0;  // minimizing i, 0-based
    double value = 1.0;
};

/// Cumulative small-divisor minima omega_A(m) for 2 <= m <= cap.
/// omega(m) = min({ |lambda^a - lambda_i| : a in A, 2 <= |a| <= m }, 1).
struct DivisorTable {
    int cap = 0;
    std::vector<double> omega;            // omega[m], m = 0..cap; m < 2 uses the +inf convention
    std::vector<DivisorWitness> witness;  // witness[m] minimizes at level m

    double at(int m) const {
        if (m < 2) return std::numeric_limits<double>::infinity();
        return omega[std::min(m, cap)];
    }
};

inline DivisorTable divisor_table(const std::vector<double>& angles, const ExponentSet& A,
                                  int cap, double zero_eps = 1e-14) {
    const int d = static_cast<int>(angles.size());
    DivisorTable t;
    t.cap = cap;
    t.omega.assign(cap + 1, 1.0);
    t.witness.assign(cap + 1, {});
    std::vector<double> best(cap + 1, 1.0);
    std::vector<DivisorWitness> bw(cap + 1);
    for_each_index(d, 2, cap, [&](const MultiIndex& a) {
        if (!A.contains(a)) return;
        long double ph = 0;
        for (int j = 0; j < d; ++j) ph += static_cast<long double>(a[j]) * angles[j];
        const int deg = a.degree();
        for (int i = 0; i < d; ++i) {
            double v = unit_gap(static_cast<double>(ph), angles[i]);
            if (v < zero_eps)
                throw ZeroDivisor("exact resonance in A: lambda^" + a.str() + " = lambda_" +
                                  std::to_string(i + 1));
            if (v < best[deg]) {
                best[deg] = v;
                bw[deg] = {a, i, v};
            }
        }
    });
    double cur = 1.0;
    DivisorWitness curw;
    for (int m = 2; m <= cap; ++m) {
        if (best[m] < cur) {
            cur = best[m];
            curw = bw[m];
        }
        t.omega[m] = cur;
        t.witness[m] = curw;
    }
    return t;
}

/// Dyadic Brjuno diagnostics: omega_A(2^m) for m = 1..levels, the partial sums
/// S_M = sum_{m<=M} 2^{-m} log omega^{-1}(2^m), and the minimizing divisors.
struct BrjunoReport {
    int levels = 0;
    std::vector<double> omega;       // omega[m-1] = omega_A(2^m)
    std::vector<DivisorWitness> witnesses;
    std::vector<double> partial_sums;
    std::vector<double> increments;  // increments[m-1] = 2^{-m} log omega^{-1}(2^m)

    /// True when increments strictly decrease over m = from..to.
    bool increments_decrease(int from, int to) const {
        for (int m = from; m < to; ++m)
            if (!(increments[m] < increments[m - 1])) return false;
        return true;
    }
};

inline BrjunoReport brjuno_omega(const std::vector<double>& angles, const ExponentSet& A,
                                 int levels) {
    if (levels < 1) throw ConfigInvalid("brjuno_omega: need at least one dyadic level");
    BrjunoReport r;
    r.levels = levels;
    DivisorTable t = divisor_table(angles, A, 1 << levels);
    double s = 0;
    for (int m = 1; m <= levels; ++m) {
        double om = t.at(1 << m);
        r.omega.push_back(om);
        r.witnesses.push_back(t.witness[std::min(1 << m, t.cap)]);
        double inc = std::ldexp(std::log(1.0 / om), -m);
        r.increments.push_back(inc);
        s += inc;
        r.partial_sums.push_back(s);
    }
    return r;
}

inline BrjunoReport brjuno_omega(const Multipliers& mult, const ExponentSet& A, int levels) {
    return brjuno_omega(mult.angles, A, levels);
}

struct PartialSumReport {
    std::vector<double> sums;
    std::vector<double> increments;
    bool increments_decay = false;  // strictly decreasing over the upper half of the range
};

inline PartialSumReport brjuno_partial_sums(const BrjunoReport& r) {
    if (r.levels < 2) throw ConfigInvalid("brjuno_partial_sums: need at least two levels");
    PartialSumReport p;
    p.sums = r.partial_sums;
    p.increments = r.increments;
    int from = r.levels / 2 + 1;
    p.increments_decay = r.increments_decrease(from, r.levels);
    return p;
}

}  // namespace oneres
