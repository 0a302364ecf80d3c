#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "brjuno.hpp"
#include "errors.hpp"
#include "exponent_set.hpp"
#include "germ.hpp"
#include "series.hpp"

namespace oneres {

struct EliminationOptions {
    double zero_divisor_eps = 1e-14;  // below this a divisor counts as exact resonance
    double tolerated_rhs = 1e-12;     // resonant component passes if |rhs| stays below
    bool check_conditions = true;
    bool preserve_bitwise = true;     // copy f_a verbatim on the preserved set
};

struct ConjugationResult {
    SeriesMap H;  // tangent to identity
    SeriesMap G;
    int cap = 0;
    std::vector<double> angles;
    double residual = 0;               // max coefficient of F(H) - H(G) through cap
    double divisor_floor = 1.0;        // smallest divisor used in an actual division
    double divisor_floor_scanned = 1.0;
    double max_eliminated_abs = 0;     // max |g_a| over a in A after the run (tolerated resonances)
    std::vector<MultiIndex> eliminated;
    std::map<MultiIndex, double> h_norm1;  // ||h_a||_1 for the majorant checks
    std::vector<std::string> stage_log;
};

namespace detail {

// Condition (1): lower sets. A0 must be downward closed; minors of A stay in A0 u A.
inline void check_condition1(const ExponentSet& A0, const ExponentSet& A, int d, int cap,
                             const std::string& stage) {
    for_each_index(d, 1, cap, [&](const MultiIndex& a) {
        bool in0 = A0.contains(a), inA = a.degree() >= 2 && A.contains(a);
        if (!in0 && !inA) return;
        for_each_minor(a, [&](const MultiIndex& b) {
            if (b.degree() < 1 || b == a) return;
            if (in0 && !A0.contains(b))
                throw ConditionViolated(1, stage + "condition (1): " + b.str() + " <= " +
                                               a.str() + " escapes A0");
            if (inA && !A0.contains(b) && !(b.degree() >= 2 && A.contains(b)))
                throw ConditionViolated(1, stage + "condition (1): " + b.str() + " <= " +
                                               a.str() + " escapes A0 u A");
        });
    });
}

// Condition (2), quantified over the stored nonzero coefficients of F:
// sums b1+...+bl of A0-supported indices with |b1| >= 2 and nonzero coefficient
// product must have e_J = e_{j1}+...+e_{jl} outside A.
inline void check_condition2(const SeriesMap& F, const ExponentSet& A0, const ExponentSet& A,
                             int cap, const std::string& stage) {
    const int d = F.vars;
    // reachable states (sum, e_J, has a factor of degree >= 2), built as a fixpoint
    using State = std::tuple<MultiIndex, MultiIndex, bool>;
    std::set<State> seen;
    std::vector<State> frontier;
    std::vector<std::pair<MultiIndex, int>> gens;  // (index, component) with f != 0, A0 members
    for (const auto& [a, v] : F.c) {
        if (a.degree() < 1 || !A0.contains(a)) continue;
        for (int j = 0; j < d; ++j)
            if (v[j] != Cx{}) gens.emplace_back(a, j);
    }
    State root{MultiIndex(d), MultiIndex(d), false};
    seen.insert(root);
    frontier.push_back(root);
    while (!frontier.empty()) {
        State st = frontier.back();
        frontier.pop_back();
        const auto& [sum, eJ, big] = st;
        for (const auto& [b, j] : gens) {
            MultiIndex ns = sum + b;
            if (ns.degree() > cap) continue;
            MultiIndex ne = eJ;
            ne[j] += 1;
            State nx{ns, ne, big || b.degree() >= 2};
            if (seen.insert(nx).second) frontier.push_back(nx);
        }
    }
    for (const auto& [sum, eJ, big] : seen) {
        if (!big || sum.degree() < 2) continue;
        bool relevant = A0.contains(sum) || A.contains(sum);
        if (relevant && eJ.degree() >= 2 && A.contains(eJ))
            throw ConditionViolated(2, stage + "condition (2): product with sum " + sum.str() +
                                           " yields e_J = " + eJ.str() + " inside A");
    }
}

}  // namespace detail

/// One pass of the homological equation F(H) = H(G): h_a = 0 off A, and for
/// a in A each component solves (lambda^a - lambda_j) h_a^j = rhs_a^j.
/// Indices in A0 keep their coefficient verbatim; everything else is free.
inline ConjugationResult solve_homological(const SeriesMap& F, const std::vector<double>& angles,
                                           const ExponentSet& A0, const ExponentSet& A, int cap,
                                           const EliminationOptions& opts = {}) {
    const int d = F.vars;
    if (static_cast<int>(angles.size()) != d) throw DimensionMismatch("angle count != vars");
    if (opts.check_conditions) {
        detail::check_condition1(A0, A, d, cap, "");
        detail::check_condition2(F, A0, A, cap, "");
    }

    ConjugationResult out;
    out.cap = cap;
    out.angles = angles;
    CVec lambda(d);
    for (int j = 0; j < d; ++j) lambda[j] = unit_phase(angles[j]);

    SeriesMap H = SeriesMap::identity(d, cap);
    SeriesMap G = SeriesMap::linear_diag(lambda, cap);
    const double fscale = std::max(F.max_abs(), 1.0);

    for (int n = 2; n <= cap; ++n) {
        SeriesMap FH = compose(F, H, n);
        SeriesMap HG = compose(H, G, n);
        std::set<MultiIndex> idxs;
        for (const auto& [a, v] : FH.c)
            if (a.degree() == n) idxs.insert(a);
        for (const auto& [a, v] : HG.c)
            if (a.degree() == n) idxs.insert(a);
        // every A-index of this degree is visited so the scanned floor is honest
        for_each_index(d, n, n, [&](const MultiIndex& a) {
            if (A.contains(a)) idxs.insert(a);
        });
        for (const MultiIndex& a : idxs) {
            CVec rhs(d);
            for (int j = 0; j < d; ++j) rhs[j] = FH.coeff(a, j) - HG.coeff(a, j);
            if (A.contains(a)) {
                long double ph = 0;
                for (int j = 0; j < d; ++j) ph += static_cast<long double>(a[j]) * angles[j];
                double norm1 = 0;
                for (int j = 0; j < d; ++j) {
                    double gap = unit_gap(static_cast<double>(ph), angles[j]);
                    out.divisor_floor_scanned = std::min(out.divisor_floor_scanned, gap);
                    if (gap < opts.zero_divisor_eps) {
                        if (std::abs(rhs[j]) > opts.tolerated_rhs * fscale)
                            throw ZeroDivisor("resonant component " + a.str() + " e_" +
                                              std::to_string(j + 1) + " carries coefficient " +
                                              std::to_string(std::abs(rhs[j])));
                        out.max_eliminated_abs = std::max(out.max_eliminated_abs, std::abs(rhs[j]));
                        continue;  // h stays 0; the residue is reported, not divided
                    }
                    if (rhs[j] == Cx{}) continue;
                    Cx div = unit_phase(static_cast<double>(std::fmod(ph, 1.0L))) - lambda[j];
                    Cx h = rhs[j] / div;
                    H.set(a, j, h);
                    norm1 += std::abs(h);
                    out.divisor_floor = std::min(out.divisor_floor, gap);
                }
                out.eliminated.push_back(a);
                if (norm1 > 0) out.h_norm1[a] = norm1;
            } else if (A0.contains(a)) {
                if (opts.preserve_bitwise) {
                    if (const CVec* fv = F.coeffs(a))
                        for (int j = 0; j < d; ++j) G.set(a, j, (*fv)[j]);
                } else {
                    for (int j = 0; j < d; ++j) G.set(a, j, rhs[j]);
                }
            } else {
                for (int j = 0; j < d; ++j) G.set(a, j, rhs[j]);
            }
        }
    }

    SeriesMap FH = compose(F, H, cap);
    SeriesMap HG = compose(H, G, cap);
    out.residual = max_coeff_diff(FH, HG);
    for (const MultiIndex& a : out.eliminated)
        if (const CVec* gv = G.coeffs(a))
            for (int j = 0; j < d; ++j)
                out.max_eliminated_abs = std::max(out.max_eliminated_abs, std::abs((*gv)[j]));
    out.H = std::move(H);
    out.G = std::move(G);
    return out;
}

/// Stage-wise elimination over a partition A = A_1 u ... u A_k0: stage m runs
/// the single-set solver with the preserved set A0 u A_1 u ... u A_{m-1}.
inline ConjugationResult iterated_elimination(const SeriesMap& F, const std::vector<double>& angles,
                                              const ExponentSet& A0,
                                              const std::vector<ExponentSet>& levels, int cap,
                                              const EliminationOptions& opts = {}) {
    const int d = F.vars;
    ConjugationResult total;
    total.cap = cap;
    total.angles = angles;
    total.H = SeriesMap::identity(d, cap);
    SeriesMap cur = F;
    for (std::size_t m = 0; m < levels.size(); ++m) {
        std::vector<ExponentSet> below(levels.begin(), levels.begin() + m);
        ExponentSet stageA0 = ExponentSet::custom(
            [A0, below](const MultiIndex& a) {
                if (A0.contains(a)) return true;
                for (const auto& s : below)
                    if (s.contains(a)) return true;
                return false;
            },
            "A0+levels<" + std::to_string(m + 1));
        ConjugationResult step;
        try {
            step = solve_homological(cur, angles, stageA0, levels[m], cap, opts);
        } catch (ConditionViolated& e) {
            throw ConditionViolated(e.condition,
                                    "stage " + std::to_string(m + 1) + ": " + e.what());
        } catch (ZeroDivisor& e) {
            throw ZeroDivisor("stage " + std::to_string(m + 1) + ": " + e.what());
        }
        total.H = compose(total.H, step.H, cap);
        cur = step.G;
        total.divisor_floor = std::min(total.divisor_floor, step.divisor_floor);
        total.divisor_floor_scanned =
            std::min(total.divisor_floor_scanned, step.divisor_floor_scanned);
        total.eliminated.insert(total.eliminated.end(), step.eliminated.begin(),
                                step.eliminated.end());
        for (const auto& [a, v] : step.h_norm1)
            total.h_norm1[a] = std::max(total.h_norm1[a], v);
        total.stage_log.push_back("stage " + std::to_string(m + 1) + " [" + levels[m].label +
                                  "]: residual " + std::to_string(step.residual));
    }
    total.G = cur;
    SeriesMap FH = compose(F, total.H, cap);
    SeriesMap HG = compose(total.H, total.G, cap);
    total.residual = max_coeff_diff(FH, HG);
    for (const MultiIndex& a : total.eliminated)
        if (const CVec* gv = total.G.coeffs(a))
            for (int j = 0; j < d; ++j)
                total.max_eliminated_abs = std::max(total.max_eliminated_abs, std::abs((*gv)[j]));
    return total;
}

/// Outcome of the nicer-tail run: the conjugation plus the survivor audit.
struct NicerTailResult {
    ConjugationResult conj;
    std::vector<std::pair<MultiIndex, double>> survivors;  // non-normal-form, above threshold
    double max_offzone_abs = 0;  // largest survivor outside {b >= l*alpha}
    bool offzone_clean(double tol = 1e-10) const { return max_offzone_abs < tol; }
};

/// Conjugates F = F_N + O(|z|^l) to F_N + O(z^{l alpha}) through `cap`.
///
/// Runs in two phases. The low-order phase removes every non-resonant,
/// non-normal-form monomial of degree <= ld+1 outside the survivor zone
/// {b >= l alpha}; this is the truncated counterpart of the normal-form step
/// the corollary invokes before partitioning (resonant components are left
/// alone and audited: they receive no coupling from tails supported on a
/// single component, and a genuine residue is reported, not hidden). The
/// second phase runs the min-coordinate partition A_m = {|b| > ld+1,
/// min b = m-1}, m = 1..l, through the stage-wise solver.
inline NicerTailResult nicer_tail_preset(const GermSpec& germ, int cap,
                                         const EliminationOptions& user_opts = {}) {
    if (germ.l <= 2 * germ.k * germ.d() + 1)
        throw ConfigInvalid("nicer_tail_preset: germ tail order must exceed 2kd+1");
    const int d = germ.d();
    const int k = germ.k;
    const int l = germ.l;
    const int low_cap = l * d + 1;
    SeriesMap F = germ.to_series(cap);

    auto is_normal_form = [d, k](const MultiIndex& a) {
        // e_j or k*alpha + e_j
        if (a.degree() == 1) return true;
        int q = a.min_entry();
        if (q != k) return false;
        int bigger = 0;
        for (int j = 0; j < d; ++j) {
            if (a[j] == k + 1)
                ++bigger;
            else if (a[j] != k)
                return false;
        }
        return bigger == 1;
    };
    auto in_survivor_zone = [d, l](const MultiIndex& a) {
        for (int j = 0; j < d; ++j)
            if (a[j] < l) return false;
        return true;
    };

    EliminationOptions opts = user_opts;
    opts.check_conditions = false;  // phase one is the normal-form step, not Thm-style
    ExponentSet lowA = ExponentSet::custom(
        [=](const MultiIndex& a) {
            int deg = a.degree();
            if (deg < 2 || deg > low_cap) return false;
            return !is_normal_form(a) && !in_survivor_zone(a);
        },
        "low-order cleanup");
    ConjugationResult phase1 =
        solve_homological(F, germ.mult.angles, ExponentSet::empty(), lowA, cap, opts);

    // literal partition of the corollary on the high-degree range
    ExponentSet A0 = ExponentSet::low_order(low_cap);
    std::vector<ExponentSet> levels;
    for (int m = 1; m <= l; ++m) levels.push_back(ExponentSet::min_level(m - 1, low_cap));
    EliminationOptions opts2 = user_opts;
    ConjugationResult phase2 =
        iterated_elimination(phase1.G, germ.mult.angles, A0, levels, cap, opts2);

    NicerTailResult out;
    out.conj.cap = cap;
    out.conj.angles = germ.mult.angles;
    out.conj.H = compose(phase1.H, phase2.H, cap);
    out.conj.G = phase2.G;
    out.conj.divisor_floor = std::min(phase1.divisor_floor, phase2.divisor_floor);
    out.conj.divisor_floor_scanned =
        std::min(phase1.divisor_floor_scanned, phase2.divisor_floor_scanned);
    out.conj.eliminated = phase1.eliminated;
    out.conj.eliminated.insert(out.conj.eliminated.end(), phase2.eliminated.begin(),
                               phase2.eliminated.end());
    out.conj.h_norm1 = phase1.h_norm1;
    for (const auto& [a, v] : phase2.h_norm1)
        out.conj.h_norm1[a] = std::max(out.conj.h_norm1[a], v);
    out.conj.max_eliminated_abs = std::max(phase1.max_eliminated_abs, phase2.max_eliminated_abs);
    SeriesMap FH = compose(F, out.conj.H, cap);
    SeriesMap HG = compose(out.conj.H, out.conj.G, cap);
    out.conj.residual = max_coeff_diff(FH, HG);
    out.conj.stage_log = phase1.stage_log;
    out.conj.stage_log.push_back("low-order cleanup: residual " + std::to_string(phase1.residual));
    out.conj.stage_log.insert(out.conj.stage_log.end(), phase2.stage_log.begin(),
                              phase2.stage_log.end());

    const double dust = 1e-13 * std::max(1.0, F.max_abs());
    for (const auto& [a, v] : out.conj.G.c) {
        if (is_normal_form(a)) continue;
        double mag = 0;
        for (const Cx& x : v) mag = std::max(mag, std::abs(x));
        if (mag <= dust) continue;
        out.survivors.emplace_back(a, mag);
        if (!in_survivor_zone(a)) out.max_offzone_abs = std::max(out.max_offzone_abs, mag);
    }
    return out;
}

}  // namespace oneres
