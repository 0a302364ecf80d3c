#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "basin.hpp"
#include "complex_util.hpp"
#include "errors.hpp"
#include "germ.hpp"

namespace oneres {

/// Which iterates an OrbitTrace keeps: a dense prefix, geometrically spaced
/// checkpoints, the final step, and optionally a dense argument window for
/// the direction diagnostics.
struct RetentionSpec {
    double log_base = 1.1;
    long dense_prefix = 16;
    long window_lo = -1, window_hi = -1;  // collect per-step arguments in [lo, hi]
    long window_stride = 1;
};

struct OrbitSample {
    long n = 0;
    CVec z;
    Cx u{};
    Cx U{};          // u^{-k}; meaningless when u = 0
    bool U_valid = false;
};

struct OrbitTrace {
    int d = 0, k = 0;
    long n_end = 0;
    bool left_ball = false;
    bool hit_hyperplane = false;
    int hyperplane_j = -1;
    std::vector<OrbitSample> samples;
    // dense window: per retained step, (n, arg z^2..arg z^d, arg u)
    std::vector<long> window_n;
    std::vector<std::vector<double>> window_args;  // [j-2][i] for j = 2..d
    std::vector<double> window_argsum;             // arg u representative

    const OrbitSample& back() const { return samples.back(); }
};

inline Cx inv_power(Cx u, int k) {
    Cx uk = 1.0;
    for (int i = 0; i < k; ++i) uk *= u;
    return 1.0 / uk;
}

/// Iterates the germ from z0 until n_max or exit from the ball of radius
/// `ball` (sup norm), recording per RetentionSpec.
inline OrbitTrace iterate_orbit(const GermSpec& germ, CVec z0, long n_max, double ball,
                                const RetentionSpec& ret = {}) {
    const int d = germ.d();
    OrbitTrace tr;
    tr.d = d;
    tr.k = germ.k;
    if (ret.window_lo >= 0) tr.window_args.resize(d - 1);
    CVec z = std::move(z0);
    long next_checkpoint = 0;
    double geom = 1.0;
    for (long n = 0; n <= n_max; ++n) {
        Cx u = 1.0;
        double sup = 0.0;
        for (int j = 0; j < d; ++j) {
            u *= z[j];
            sup = std::max(sup, std::abs(z[j]));
        }
        bool keep = n == n_max || n <= ret.dense_prefix || n >= next_checkpoint;
        if (keep) {
            OrbitSample s;
            s.n = n;
            s.z = z;
            s.u = u;
            if (u != Cx{}) {
                s.U = inv_power(u, germ.k);
                s.U_valid = true;
            }
            tr.samples.push_back(std::move(s));
            while (next_checkpoint <= n) {
                geom *= ret.log_base;
                next_checkpoint = std::max<long>(next_checkpoint + 1, static_cast<long>(geom));
            }
        }
        if (ret.window_lo >= 0 && n >= ret.window_lo && n <= ret.window_hi &&
            (n - ret.window_lo) % ret.window_stride == 0) {
            tr.window_n.push_back(n);
            for (int j = 1; j < d; ++j) tr.window_args[j - 1].push_back(std::arg(z[j]));
            tr.window_argsum.push_back(std::arg(u));
        }
        tr.n_end = n;
        if (sup > ball) {
            tr.left_ball = true;
            break;
        }
        for (int j = 0; j < d; ++j)
            if (std::abs(z[j]) < 1e-300 && z[j] != Cx{}) z[j] = 0.0;  // flush denormal dust
        if (n == n_max) break;
        z = germ.evaluate(z);
    }
    // hyperplane flag: a coordinate pinned at (numerical) zero throughout
    for (int j = 0; j < d; ++j) {
        bool zero = true;
        for (const OrbitSample& s : tr.samples)
            if (std::abs(s.z[j]) >= 1e-14) {
                zero = false;
                break;
            }
        if (zero) {
            tr.hit_hyperplane = true;
            tr.hyperplane_j = j;
            break;
        }
    }
    return tr;
}

struct AsymptoticsReport {
    long window_lo = 0, window_hi = 0;
    double dev_at_end = 0;       // |n^{1/k} u_n - zeta_k^h| at the last sample
    double dev_sup_window = 0;   // sup over retained samples in the window
    std::vector<double> ratio_min, ratio_max;  // of |z_n^j| n^{1/(kd)} per j
};

/// Prop-3.2-style rates along a retained trace that converged into sector h.
inline AsymptoticsReport check_asymptotics(const OrbitTrace& tr, int h, long window_lo = 1000) {
    const int d = tr.d, k = tr.k;
    const OrbitSample& last = tr.back();
    if (!last.U_valid || last.U.real() <= 0)
        throw NotInBasin("check_asymptotics: trace did not converge into a petal");
    double target_turns = static_cast<double>(h) / k;
    AsymptoticsReport rep;
    rep.window_lo = window_lo;
    rep.window_hi = tr.n_end;
    rep.ratio_min.assign(d, 1e300);
    rep.ratio_max.assign(d, -1e300);
    Cx zeta = unit_phase(target_turns);
    for (const OrbitSample& s : tr.samples) {
        if (s.n < window_lo || !s.U_valid) continue;
        double dev = std::abs(std::pow(static_cast<double>(s.n), 1.0 / k) * s.u - zeta);
        rep.dev_sup_window = std::max(rep.dev_sup_window, dev);
        if (s.n == tr.n_end) rep.dev_at_end = dev;
        double nr = std::pow(static_cast<double>(s.n), 1.0 / (k * d));
        for (int j = 0; j < d; ++j) {
            double r = std::abs(s.z[j]) * nr;
            rep.ratio_min[j] = std::min(rep.ratio_min[j], r);
            rep.ratio_max[j] = std::max(rep.ratio_max[j], r);
        }
    }
    return rep;
}

enum class OrbitClass { Basin, SiegelHyperplane, Escaped, Undecided };

struct OrbitVerdict {
    OrbitClass kind = OrbitClass::Undecided;
    int h = -1;           // Basin: sector index
    int j = -1;           // SiegelHyperplane: coordinate
    long first_n = -1;    // first basin entry / escape step
    long steps = 0;
    std::string detail;
};

/// Trichotomy classification against a certified basin. Basin(h) requires
/// membership at entry and over a persistence window (invariance makes a
/// single later exit a numerical red flag, so it is checked, not assumed).
inline OrbitVerdict classify_stable_orbit(const GermSpec& germ, CVec z0, const BasinParams& params,
                                          double ball, long n_max, long persist = 64) {
    const int d = germ.d();
    OrbitVerdict v;
    CVec z = std::move(z0);
    bool zero_coord[16] = {};
    for (int j = 0; j < d; ++j) zero_coord[j] = std::abs(z[j]) < 1e-14;
    for (long n = 0; n <= n_max; ++n) {
        v.steps = n;
        double sup = 0.0;
        for (int j = 0; j < d; ++j) sup = std::max(sup, std::abs(z[j]));
        if (sup > ball) {
            v.kind = OrbitClass::Escaped;
            v.first_n = n;
            return v;
        }
        for (int j = 0; j < d; ++j) {
            if (!zero_coord[j]) continue;
            if (std::abs(z[j]) >= 1e-14) zero_coord[j] = false;
        }
        if (n == 256) {  // pinned coordinate => rotation on a hyperplane
            for (int j = 0; j < d; ++j)
                if (zero_coord[j]) {
                    v.kind = OrbitClass::SiegelHyperplane;
                    v.j = j;
                    v.first_n = 0;
                    return v;
                }
        }
        for (int h = 0; h < params.k; ++h) {
            if (!in_basin(z, params.with_h(h))) continue;
            v.first_n = n;
            CVec w = z;
            for (long s = 0; s < persist; ++s) {
                w = germ.evaluate(w);
                if (!in_basin(w, params.with_h(h))) {
                    v.kind = OrbitClass::Undecided;
                    v.detail = "membership did not persist (numerical red flag)";
                    return v;
                }
            }
            v.kind = OrbitClass::Basin;
            v.h = h;
            return v;
        }
        if (n == n_max) break;
        z = germ.evaluate(z);
    }
    v.kind = OrbitClass::Undecided;
    return v;
}

struct DirectionReport {
    std::vector<double> v_hat;        // estimated modulus direction |z_n|/||z_n||
    double argsum_dev_end = 0;        // |arg-sum - 2 pi h / k| at the last sample
    double max_gap = 0;               // largest circular gap of sampled arg z^2 (then worst j)
    double modulus_ratio_drift = 0;   // spread of |z^1|/|z^j| over the tail window
    double span_condition = 1e300;    // condition number of the best d-direction sample matrix
};

namespace detail {

inline double circular_max_gap(std::vector<double> a) {
    if (a.size() < 2) return 2.0 * std::numbers::pi;
    for (double& x : a) {
        x = std::fmod(x, 2.0 * std::numbers::pi);
        if (x < 0) x += 2.0 * std::numbers::pi;
    }
    std::sort(a.begin(), a.end());
    double gap = a.front() + 2.0 * std::numbers::pi - a.back();
    for (std::size_t i = 1; i < a.size(); ++i) gap = std::max(gap, a[i] - a[i - 1]);
    return gap;
}

inline double cond2(const std::vector<CVec>& M) {
    // 2-norm condition estimate via the Gram matrix power iteration (small d)
    const int n = static_cast<int>(M.size());
    std::vector<CVec> G(n, CVec(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Cx s = 0;
            for (int t = 0; t < n; ++t) s += std::conj(M[t][i]) * M[t][j];
            G[i][j] = s;
        }
    auto mulv = [&](const CVec& x) {
        CVec y(n);
        for (int i = 0; i < n; ++i) {
            Cx s = 0;
            for (int j = 0; j < n; ++j) s += G[i][j] * x[j];
            y[i] = s;
        }
        return y;
    };
    auto norm = [&](const CVec& x) {
        double s = 0;
        for (const Cx& v : x) s += std::norm(v);
        return std::sqrt(s);
    };
    CVec x(n, Cx{1.0, 0.3});
    double lam_max = 0;
    for (int it = 0; it < 200; ++it) {
        x = mulv(x);
        lam_max = norm(x);
        for (Cx& v : x) v /= lam_max;
    }
    // smallest eigenvalue via det of G (d <= 3 in practice) -- use determinant ratio
    // fall back: inverse power iteration through Gaussian solve
    std::vector<CVec> A = G;
    std::vector<CVec> inv(n, CVec(n));
    for (int i = 0; i < n; ++i) inv[i][i] = 1.0;
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
        if (std::abs(A[piv][col]) < 1e-280) return 1e300;
        std::swap(A[piv], A[col]);
        std::swap(inv[piv], inv[col]);
        Cx p = A[col][col];
        for (int j = 0; j < n; ++j) {
            A[col][j] /= p;
            inv[col][j] /= p;
        }
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            Cx f = A[r][col];
            for (int j = 0; j < n; ++j) {
                A[r][j] -= f * A[col][j];
                inv[r][j] -= f * inv[col][j];
            }
        }
    }
    CVec y(n, Cx{0.7, -0.2});
    double lam_inv = 0;
    for (int it = 0; it < 200; ++it) {
        CVec t(n);
        for (int i = 0; i < n; ++i) {
            Cx s = 0;
            for (int j = 0; j < n; ++j) s += inv[i][j] * y[j];
            t[i] = s;
        }
        lam_inv = norm(t);
        for (int i = 0; i < n; ++i) y[i] = t[i] / lam_inv;
    }
    double lam_min = 1.0 / lam_inv;
    return std::sqrt(lam_max / lam_min);
}

}  // namespace detail

/// Direction-of-convergence diagnostics over the trace's dense window.
inline DirectionReport direction_accumulation(const OrbitTrace& tr, int h) {
    if (tr.samples.empty() || !tr.back().U_valid || tr.back().U.real() <= 0)
        throw NotInBasin("direction_accumulation: trace did not converge into a petal");
    const int d = tr.d;
    DirectionReport rep;
    const OrbitSample& last = tr.back();
    double nrm = 0;
    for (int j = 0; j < d; ++j) nrm += std::norm(last.z[j]);
    nrm = std::sqrt(nrm);
    rep.v_hat.resize(d);
    for (int j = 0; j < d; ++j) rep.v_hat[j] = std::abs(last.z[j]) / nrm;
    double dev = wrap_pi(std::arg(last.u) - 2.0 * std::numbers::pi * h / tr.k);
    rep.argsum_dev_end = std::abs(dev);
    if (!tr.window_args.empty()) {
        rep.max_gap = 0;
        for (const auto& col : tr.window_args)
            rep.max_gap = std::max(rep.max_gap, detail::circular_max_gap(col));
    }
    // modulus-ratio drift over the last half of the retained tail
    double rmin = 1e300, rmax = 0;
    for (const OrbitSample& s : tr.samples) {
        if (s.n < tr.n_end / 2 || s.n < 1) continue;
        double a = std::abs(s.z[0]), b = std::abs(s.z[d - 1]);
        if (b > 0) {
            rmin = std::min(rmin, a / b);
            rmax = std::max(rmax, a / b);
        }
    }
    rep.modulus_ratio_drift = (rmax > 0 && rmin < 1e300) ? rmax - rmin : 0.0;
    // spanning check: pick d well-separated retained directions, best condition
    std::vector<const OrbitSample*> tail;
    for (const OrbitSample& s : tr.samples)
        if (s.n >= tr.n_end / 4) tail.push_back(&s);
    if (static_cast<int>(tail.size()) >= d) {
        for (int attempt = 0; attempt < 8; ++attempt) {
            std::vector<CVec> M(d, CVec(d));
            for (int r = 0; r < d; ++r) {
                const OrbitSample& s =
                    *tail[(attempt + r * tail.size() / d) % tail.size()];
                double nn = 0;
                for (int j = 0; j < d; ++j) nn += std::norm(s.z[j]);
                nn = std::sqrt(nn);
                for (int j = 0; j < d; ++j) M[r][j] = s.z[j] / nn;
            }
            rep.span_condition = std::min(rep.span_condition, detail::cond2(M));
        }
    }
    return rep;
}

}  // namespace oneres
