#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <vector>

#include "brjuno.hpp"
#include "elimination.hpp"
#include "exponent_set.hpp"
#include "multi_index.hpp"

namespace oneres {

/// sigma_1 = 1, sigma_r = d * sum_{k=2..r} sum_{r_1+...+r_k=r} sigma_{r_1}...sigma_{r_k}.
inline std::vector<double> sigma_by_recursion(int d, int r_max) {
    std::vector<double> s(r_max + 1, 0.0);
    if (r_max >= 1) s[1] = 1.0;
    for (int r = 2; r <= r_max; ++r) {
        // conv[k][m] = sum over compositions of m into k parts of products of sigma,
        // built incrementally; only parts < r enter since k >= 2.
        std::vector<double> prev(r + 1, 0.0);
        for (int m = 1; m < r; ++m) prev[m] = s[m];  // k = 1
        double total = 0.0;
        for (int k = 2; k <= r; ++k) {
            std::vector<double> cur(r + 1, 0.0);
            for (int m = k; m <= r; ++m) {
                double acc = 0.0;
                for (int t = 1; t <= m - k + 1 && t < r; ++t) acc += prev[m - t] * s[t];
                cur[m] = acc;
            }
            total += cur[r];
            prev.swap(cur);
        }
        s[r] = d * total;
    }
    return s;
}

/// Taylor coefficients of (1 + t - sqrt((1+t)^2 - 4(d+1)t)) / (2(d+1)),
/// the closed-form generating function, via the power-series square root.
inline std::vector<double> sigma_by_closed_form(int d, int r_max) {
    std::vector<double> p(r_max + 1, 0.0);
    p[0] = 1.0;
    if (r_max >= 1) p[1] = 2.0 - 4.0 * (d + 1);
    if (r_max >= 2) p[2] = 1.0;
    std::vector<double> q(r_max + 1, 0.0);
    q[0] = 1.0;
    for (int r = 1; r <= r_max; ++r) {
        double acc = p[r];
        for (int i = 1; i < r; ++i) acc -= q[i] * q[r - i];
        q[r] = acc / 2.0;
    }
    std::vector<double> s(r_max + 1, 0.0);
    for (int r = 1; r <= r_max; ++r) {
        double num = (r == 1 ? 1.0 : 0.0) - q[r];
        s[r] = num / (2.0 * (d + 1));
    }
    return s;
}

/// Coefficients of sigma(t) - t - d sigma(t)^2 / (1 - sigma(t)), which must
/// vanish identically; computed from the recursion values.
inline std::vector<double> sigma_gf_residual(int d, int order) {
    std::vector<double> s = sigma_by_recursion(d, order);
    std::vector<double> sq(order + 1, 0.0);
    for (int r = 0; r <= order; ++r)
        for (int i = 0; i <= r; ++i) sq[r] += s[i] * s[r - i];
    // w = sq / (1 - s):  w_r = sq_r + sum_{i>=1} s_i w_{r-i}
    std::vector<double> w(order + 1, 0.0);
    for (int r = 0; r <= order; ++r) {
        double acc = sq[r];
        for (int i = 1; i <= r; ++i) acc += s[i] * w[r - i];
        w[r] = acc;
    }
    std::vector<double> res(order + 1, 0.0);
    for (int r = 0; r <= order; ++r)
        res[r] = s[r] - (r == 1 ? 1.0 : 0.0) - d * w[r];
    return res;
}

/// Divisor-product majorants delta_alpha (log scale) with the maximising
/// decomposition recorded, so the counting bounds replay the proof's tree.
struct DivisorTreeSet {
    int d = 0;
    double theta = 1.0 / 3.0;
    std::map<MultiIndex, double> log_delta;       // alpha in A only
    std::map<MultiIndex, double> eps;             // divisor value at alpha
    std::map<MultiIndex, int> argmin_comp;        // i_alpha
    std::map<MultiIndex, std::vector<MultiIndex>> parts;  // atoms of the chosen decomposition
    DivisorTable omega;

    /// Nodes of the flattened decomposition tree below alpha (alpha included).
    void collect_nodes(const MultiIndex& a, std::vector<MultiIndex>& out) const {
        out.push_back(a);
        for (const MultiIndex& p : parts.at(a))
            if (p.degree() >= 2) collect_nodes(p, out);
    }

    /// N_m^j(alpha): tree nodes with i = j and eps < theta * omega_A(m).
    int count(const MultiIndex& a, int m, int j) const {
        std::vector<MultiIndex> nodes;
        collect_nodes(a, nodes);
        double bound = theta * omega.at(m);  // omega(1) = +inf by convention
        int n = 0;
        for (const MultiIndex& nd : nodes)
            if (argmin_comp.at(nd) == j && eps.at(nd) < bound) ++n;
        return n;
    }
};

/// Builds delta_alpha over A up to total degree cap:
/// delta is 1 on units, 0 off A, and eps^{-1} * max over decompositions on A.
inline DivisorTreeSet build_divisor_trees(const std::vector<double>& angles, const ExponentSet& A,
                                          int cap, double theta = 1.0 / 3.0) {
    const int d = static_cast<int>(angles.size());
    DivisorTreeSet t;
    t.d = d;
    t.theta = theta;
    t.omega = divisor_table(angles, A, 2 * cap);  // the dyadic bound reads up to 2|alpha|

    // best(b) = max over decompositions of b into >= 1 parts (log scale);
    // -inf marks "no admissible decomposition".
    const double NEG = -1e300;
    std::map<MultiIndex, double> best;
    std::map<MultiIndex, std::optional<std::pair<MultiIndex, MultiIndex>>> best_split;

    std::vector<MultiIndex> order;
    for_each_index(d, 1, cap, [&](const MultiIndex& a) { order.push_back(a); });
    std::sort(order.begin(), order.end(), [](const MultiIndex& x, const MultiIndex& y) {
        if (x.degree() != y.degree()) return x.degree() < y.degree();
        return x < y;
    });

    for (const MultiIndex& a : order) {
        double atom = NEG;
        double split_best = NEG;
        std::optional<std::pair<MultiIndex, MultiIndex>> split;
        if (a.degree() == 1) atom = 0.0;
        if (a.degree() >= 2) {
            // proper splits b + (a-b); enumerate half the lattice
            for_each_minor(a, [&](const MultiIndex& b) {
                if (b.degree() < 1) return;
                MultiIndex rest = a - b;
                if (rest.degree() < 1) return;
                if (rest < b) return;  // each unordered split once
                auto itb = best.find(b);
                auto itr = best.find(rest);
                if (itb == best.end() || itr == best.end()) return;
                if (itb->second <= NEG / 2 || itr->second <= NEG / 2) return;
                double v = itb->second + itr->second;
                if (v > split_best) {
                    split_best = v;
                    split = std::make_pair(b, rest);
                }
            });
            if (A.contains(a) && split) {
                int imin = 0;
                double emin = 1e300;
                for (int i = 0; i < d; ++i) {
                    double g = 0;
                    long double ph = 0;
                    for (int j = 0; j < d; ++j) ph += static_cast<long double>(a[j]) * angles[j];
                    g = unit_gap(static_cast<double>(ph), angles[i]);
                    if (g < emin) {
                        emin = g;
                        imin = i;
                    }
                }
                t.eps[a] = emin;
                t.argmin_comp[a] = imin;
                t.log_delta[a] = -std::log(emin) + split_best;
                atom = t.log_delta[a];
                // flatten the chosen split into atoms
                std::vector<MultiIndex> atoms;
                std::function<void(const MultiIndex&)> flatten = [&](const MultiIndex& b) {
                    auto sp = best_split.find(b);
                    if (sp != best_split.end() && sp->second) {
                        flatten(sp->second->first);
                        flatten(sp->second->second);
                    } else {
                        atoms.push_back(b);  // unit or an A-atom
                    }
                };
                flatten(split->first);
                flatten(split->second);
                t.parts[a] = std::move(atoms);
            }
        }
        double b = std::max(atom, split_best);
        if (b > NEG / 2) {
            best[a] = b;
            // best via atom: no split recorded, so flattening stops here
            if (atom >= split_best)
                best_split[a] = std::nullopt;
            else
                best_split[a] = split;
        }
    }
    return t;
}

struct MajorantReport {
    std::vector<double> sigma;             // recursion values
    std::vector<double> sigma_closed;      // closed-form Taylor values
    double sigma_max_rel_err = 0;
    double gf_residual_max = 0;
    // conjugation checks (present when one was supplied)
    bool have_conjugation = false;
    bool h_bound_ok = true;                // ||h_a||_1 <= sigma_{|a|} delta_a
    double h_bound_worst_margin = 1e300;   // min of log(sigma delta) - log ||h||
    bool counting_ok = true;               // N_m^j <= 2|a|/m - 1 at every node
    bool growth_ok = true;                 // (1/|a|) log delta_a vs the dyadic bound
    double growth_bound = 0;
    double growth_worst = -1e300;
    std::string detail;
};

inline MajorantReport majorant_diagnostics(int d, int r_max, const ConjugationResult* conj,
                                           const ExponentSet* A, double theta = 1.0 / 3.0) {
    MajorantReport rep;
    rep.sigma = sigma_by_recursion(d, r_max);
    rep.sigma_closed = sigma_by_closed_form(d, r_max);
    for (int r = 1; r <= r_max; ++r) {
        double rel = std::abs(rep.sigma[r] - rep.sigma_closed[r]) / std::abs(rep.sigma_closed[r]);
        rep.sigma_max_rel_err = std::max(rep.sigma_max_rel_err, rel);
    }
    for (double v : sigma_gf_residual(d, std::min(r_max, 20)))
        rep.gf_residual_max = std::max(rep.gf_residual_max, std::abs(v));

    if (conj && A) {
        rep.have_conjugation = true;
        DivisorTreeSet trees = build_divisor_trees(conj->angles, *A, conj->cap, theta);
        // scaling rho so that ||f~_a||_1 <= 1; unit-modulus germs here have
        // max coefficient <= 1 already, so rho = 1 is the common case
        std::vector<double> logsig(rep.sigma.size());
        for (std::size_t r = 1; r < rep.sigma.size(); ++r) logsig[r] = std::log(rep.sigma[r]);
        for (const auto& [a, norm] : conj->h_norm1) {
            auto it = trees.log_delta.find(a);
            if (it == trees.log_delta.end()) continue;
            if (a.degree() >= static_cast<int>(logsig.size())) continue;
            double margin = logsig[a.degree()] + it->second - std::log(norm);
            rep.h_bound_worst_margin = std::min(rep.h_bound_worst_margin, margin);
            if (margin < 0) rep.h_bound_ok = false;
        }
        int L = 1;
        while ((1 << L) < trees.omega.cap) ++L;
        double dyadic = 0;
        for (int l = 1; l <= L; ++l) {
            double om = trees.omega.at(std::min(1 << l, trees.omega.cap));
            dyadic += std::ldexp(std::log(1.0 / om), -l);
        }
        rep.growth_bound = 4.0 * d * std::log(1.0 / theta) + 4.0 * d * dyadic;
        for (const auto& [a, ld] : trees.log_delta) {
            double rate = ld / a.degree();
            rep.growth_worst = std::max(rep.growth_worst, rate);
            if (rate > rep.growth_bound) rep.growth_ok = false;
            std::vector<MultiIndex> nodes;
            trees.collect_nodes(a, nodes);
            for (const MultiIndex& nd : nodes) {
                for (int m = 1; m <= nd.degree(); ++m) {
                    for (int j = 0; j < d; ++j) {
                        int N = trees.count(nd, m, j);
                        double bound = nd.degree() <= m ? 0.0 : 2.0 * nd.degree() / m - 1.0;
                        if (N > bound + 1e-12) {
                            rep.counting_ok = false;
                            rep.detail = "N_" + std::to_string(m) + "^" + std::to_string(j + 1) +
                                         "(" + nd.str() + ") = " + std::to_string(N);
                        }
                    }
                }
            }
        }
    }
    return rep;
}

}  // namespace oneres
