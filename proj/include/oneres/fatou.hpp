#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "basin.hpp"
#include "complex_util.hpp"
#include "errors.hpp"
#include "germ.hpp"
#include "orbit.hpp"
#include "series.hpp"

namespace oneres {

/// Drift constant of psi_n = U_n - n + c log U_n for the normal-form family:
/// U_{n+1} = U_n (1 - 1/(kd U_n))^{-kd} = U_n + 1 + ((kd+1)/(2kd)) U_n^{-1} + ...
inline double fatou_drift_constant(int k, int d) {
    return -(static_cast<double>(k) * d + 1.0) / (2.0 * k * d);
}

struct BranchLog {
    int principal_logs = 0;
    int principal_roots = 0;
    int re_violations = 0;  // times a principal branch was taken with Re <= 0
    bool clean() const { return re_violations == 0; }
};

struct FatouEvaluation {
    Cx value{};
    long depth = 0;
    double est_error = 0;  // magnitude of the last increment
    BranchLog branch;
};

namespace detail {

inline Cx principal_log(Cx w, BranchLog& b) {
    ++b.principal_logs;
    if (w.real() <= 0) ++b.re_violations;
    return std::log(w);
}
inline Cx principal_root(Cx w, int order, BranchLog& b) {
    ++b.principal_roots;
    if (w.real() <= 0) ++b.re_violations;
    return std::exp(std::log(w) / static_cast<double>(order));
}

}  // namespace detail

/// Fatou coordinate psi = lim (U_n - n + c log U_n), solving psi(F) = psi + 1.
inline FatouEvaluation fatou_psi(const GermSpec& germ, const CVec& z, const BasinParams& region,
                                 long n_max = 200000, double tol = 1e-9) {
    if (!in_basin(z, region)) throw NotInBasin("fatou_psi: point is outside the certified basin");
    const int d = germ.d(), k = germ.k;
    const double c = fatou_drift_constant(k, d);
    FatouEvaluation ev;
    CVec w = z;
    Cx psi_prev;
    double last = 1e300;
    long stall = 0;
    for (long n = 0; n <= n_max; ++n) {
        Cx u = 1.0;
        for (int j = 0; j < d; ++j) u *= w[j];
        Cx U = inv_power(u, k);
        Cx psi = U - static_cast<double>(n) + c * detail::principal_log(U, ev.branch);
        if (n > 0) {
            double inc = std::abs(psi - psi_prev);
            ev.value = psi;
            ev.depth = n;
            ev.est_error = inc;
            if (inc < tol) return ev;
            if (inc >= last)
                ++stall;
            else
                stall = 0;
            if (stall > 256)
                throw NoConvergence("fatou_psi: increments stopped decreasing at n = " +
                                    std::to_string(n));
            last = inc;
        }
        psi_prev = psi;
        w = germ.evaluate(w);
    }
    return ev;  // hit n_max; est_error reports the achieved increment
}

/// sigma_{j,n}(z) = lambda_j^{-n} z_n^j ((psi + n)/psi)^{1/(kd)}, j = 2..d (1-based).
inline FatouEvaluation fatou_sigma(const GermSpec& germ, const CVec& z, int j,
                                   const BasinParams& region, long n_max = 400000,
                                   double tol = 1e-10,
                                   const FatouEvaluation* psi_hint = nullptr) {
    if (j < 2 || j > germ.d()) throw ConfigInvalid("fatou_sigma: component j must be 2..d");
    FatouEvaluation psi =
        psi_hint ? *psi_hint : fatou_psi(germ, z, region, n_max, std::min(tol, 1e-10));
    const int d = germ.d(), k = germ.k;
    const int order = k * d;
    FatouEvaluation ev;
    ev.branch = psi.branch;
    CVec w = z;
    Cx prev;
    double last = 1e300;
    long stall = 0;
    for (long n = 0; n <= n_max; ++n) {
        Cx ratio = (psi.value + static_cast<double>(n)) / psi.value;
        Cx root = detail::principal_root(ratio, order, ev.branch);
        Cx lam_inv_n = germ.mult.lambda_pow_int(j - 1, -n);
        Cx s = lam_inv_n * w[j - 1] * root;
        if (n > 0) {
            double inc = std::abs(s - prev);
            ev.value = s;
            ev.depth = n;
            ev.est_error = inc;
            if (inc < tol) return ev;
            if (inc >= last)
                ++stall;
            else
                stall = 0;
            if (stall > 1024)
                throw NoConvergence("fatou_sigma: increments stopped decreasing at n = " +
                                    std::to_string(n));
            last = inc;
        }
        prev = s;
        w = germ.evaluate(w);
    }
    return ev;
}

/// sigma_1 = e^{2 pi i h / k} (psi^{1/k} sigma_2 ... sigma_d)^{-1}; satisfies the
/// same functional equation as sigma_j, j >= 2.
inline FatouEvaluation fatou_sigma1(const GermSpec& germ, const CVec& z, const BasinParams& region,
                                    long n_max = 400000, double tol = 1e-10) {
    FatouEvaluation psi = fatou_psi(germ, z, region, n_max, std::min(tol, 1e-10));
    FatouEvaluation ev;
    ev.branch = psi.branch;
    Cx prod = detail::principal_root(psi.value, germ.k, ev.branch);
    long depth = psi.depth;
    double err = psi.est_error;
    for (int j = 2; j <= germ.d(); ++j) {
        FatouEvaluation s = fatou_sigma(germ, z, j, region, n_max, tol, &psi);
        prod *= s.value;
        depth = std::max(depth, s.depth);
        err = std::max(err, s.est_error);
        ev.branch.principal_roots += s.branch.principal_roots;
        ev.branch.re_violations += s.branch.re_violations;
    }
    ev.value = unit_phase(static_cast<double>(region.h) / germ.k) / prod;
    ev.depth = depth;
    ev.est_error = err;
    return ev;
}

/// tau_j = psi^{1/(kd)} sigma_j, the coordinate with tau_j(F) = lambda_j tau_j.
inline FatouEvaluation tau(const GermSpec& germ, const CVec& z, int j, const BasinParams& region,
                           long n_max = 400000, double tol = 1e-10,
                           const FatouEvaluation* psi_hint = nullptr) {
    FatouEvaluation psi =
        psi_hint ? *psi_hint : fatou_psi(germ, z, region, n_max, std::min(tol, 1e-10));
    FatouEvaluation s = fatou_sigma(germ, z, j, region, n_max, tol, &psi);
    FatouEvaluation ev = s;
    ev.value = detail::principal_root(psi.value, germ.k * germ.d(), ev.branch) * s.value;
    return ev;
}

/// Point of the cylinder C x (C*)^{d-1}.
struct CylinderPoint {
    Cx zeta{};
    CVec xi;  // d-1 nonzero entries
};

/// eta(zeta, xi)_j = e^{-zeta Log lambda_{j+1}} xi_j (principal Log); backward inverts.
enum class CylinderDirection { Forward, Backward };

inline CylinderPoint cylinder_conjugation(const CylinderPoint& p, const Multipliers& mult,
                                          CylinderDirection dir = CylinderDirection::Forward) {
    CylinderPoint out;
    out.zeta = p.zeta;
    out.xi.resize(p.xi.size());
    for (std::size_t i = 0; i < p.xi.size(); ++i) {
        if (p.xi[i] == Cx{}) throw ConfigInvalid("cylinder point must have nonzero xi");
        double turns = wrap_half(mult.angles[i + 1]);
        Cx log_lambda = Cx{0.0, 2.0 * std::numbers::pi * turns};
        Cx expo = (dir == CylinderDirection::Forward ? -p.zeta : p.zeta) * log_lambda;
        out.xi[i] = std::exp(expo) * p.xi[i];
    }
    return out;
}

/// Global coordinate phi_hat(z) = (psi(F^n z) - n, lambda_j^{-n} tau_j(F^n z))
/// for the first n with F^n(z) inside the certified basin (or a forced n).
struct GlobalCoordinate {
    CylinderPoint point;
    long entry_n = 0;
};

inline GlobalCoordinate global_coordinate(const GermSpec& germ, const CVec& z,
                                          const BasinParams& region, long entry_cap = 100000,
                                          long n_max = 400000, double tol = 1e-10,
                                          long forced_n = -1) {
    const int d = germ.d();
    CVec w = z;
    long n = 0;
    if (forced_n >= 0) {
        for (; n < forced_n; ++n) w = germ.evaluate(w);
        if (!in_basin(w, region))
            throw NotInBasin("global_coordinate: forced iterate is outside the basin");
    } else {
        while (!in_basin(w, region)) {
            if (n >= entry_cap)
                throw NeverEntersBasin("global_coordinate: no iterate entered the basin");
            w = germ.evaluate(w);
            ++n;
        }
    }
    FatouEvaluation psi = fatou_psi(germ, w, region, n_max, std::min(tol, 1e-10));
    GlobalCoordinate out;
    out.entry_n = n;
    out.point.zeta = psi.value - static_cast<double>(n);
    out.point.xi.resize(d - 1);
    for (int j = 2; j <= d; ++j) {
        FatouEvaluation t = tau(germ, w, j, region, n_max, tol, &psi);
        out.point.xi[j - 2] = germ.mult.lambda_pow_int(j - 1, -n) * t.value;
    }
    return out;
}

struct InjectivityReport {
    double min_normalized_separation = 1e300;  // min ||phi(x)-phi(y)|| / ||x-y||
    std::vector<std::pair<double, double>> jacobian_sweep;  // (r, |Jac - 1|)
    double containment_residual = 1e300;       // Newton residual hitting a T-target
    int grid_points = 0;
};

namespace detail {

/// Chart T -> basin: z^1 = u / (z^2...z^d) with u the k-th root of 1/U in the
/// branch nearest e^{2 pi i h / k}.
inline CVec chart_from_T(Cx U, const CVec& zprime, int k, int h) {
    const int d = static_cast<int>(zprime.size()) + 1;
    BranchLog b;
    Cx u = std::exp(-principal_log(U, b) / static_cast<double>(k)) *
           unit_phase(static_cast<double>(h) / k);
    CVec z(d);
    Cx prod = 1.0;
    for (int j = 1; j < d; ++j) {
        z[j] = zprime[j - 1];
        prod *= z[j];
    }
    z[0] = u / prod;
    return z;
}

}  // namespace detail

/// Injectivity and image-containment evidence for phi = (psi, sigma_2..sigma_d).
inline InjectivityReport check_injectivity(const GermSpec& germ, const BasinParams& params,
                                           int grid, std::uint64_t seed = 11,
                                           double tol = 1e-10) {
    const int d = germ.d(), k = germ.k;
    InjectivityReport rep;
    rep.grid_points = grid;
    std::vector<CVec> pts, imgs;
    for (int i = 0; i < grid; ++i) {
        CVec z = sample_basin_point(params, static_cast<std::uint64_t>(i), 4.0, seed);
        if (!in_basin(z, params)) continue;
        FatouEvaluation psi = fatou_psi(germ, z, params, 200000, tol);
        CVec img(d);
        img[0] = psi.value;
        for (int j = 2; j <= d; ++j)
            img[j - 1] = fatou_sigma(germ, z, j, params, 400000, tol, &psi).value;
        pts.push_back(z);
        imgs.push_back(img);
    }
    for (std::size_t a = 0; a < pts.size(); ++a)
        for (std::size_t b = a + 1; b < pts.size(); ++b) {
            double dz = 0, di = 0;
            for (int j = 0; j < d; ++j) {
                dz = std::max(dz, std::abs(pts[a][j] - pts[b][j]));
                di = std::max(di, std::abs(imgs[a][j] - imgs[b][j]));
            }
            if (dz > 0)
                rep.min_normalized_separation = std::min(rep.min_normalized_separation, di / dz);
        }

    // Jacobian of phi in the (U, z') chart at w_r = (r^{-kd}, r, .., r)
    auto phi_chart = [&](Cx U, const CVec& zp) {
        CVec z = detail::chart_from_T(U, zp, k, params.h);
        FatouEvaluation psi = fatou_psi(germ, z, params, 200000, tol);
        CVec img(d);
        img[0] = psi.value;
        for (int j = 2; j <= d; ++j)
            img[j - 1] = fatou_sigma(germ, z, j, params, 400000, tol, &psi).value;
        return img;
    };
    for (double r : {2e-3, 1e-3, 5e-4}) {
        Cx U0 = std::pow(r, -static_cast<double>(k * d));
        if (U0.real() < 2.0 * params.R) continue;
        CVec zp(d - 1, Cx{r, 0.0});
        double hU = 1e-4 * std::abs(U0), hz = 1e-5 * r;
        std::vector<CVec> J(d, CVec(d));
        {
            CVec fp = phi_chart(U0 + hU, zp), fm = phi_chart(U0 - hU, zp);
            for (int i = 0; i < d; ++i) J[i][0] = (fp[i] - fm[i]) / (2.0 * hU);
        }
        for (int col = 1; col < d; ++col) {
            CVec zpp = zp, zpm = zp;
            zpp[col - 1] += hz;
            zpm[col - 1] -= hz;
            CVec fp = phi_chart(U0, zpp), fm = phi_chart(U0, zpm);
            for (int i = 0; i < d; ++i) J[i][col] = (fp[i] - fm[i]) / (2.0 * hz);
        }
        // determinant (small d)
        Cx det;
        if (d == 2)
            det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
        else {
            std::vector<CVec> A = J;
            det = 1.0;
            for (int c2 = 0; c2 < d; ++c2) {
                int piv = c2;
                for (int r2 = c2 + 1; r2 < d; ++r2)
                    if (std::abs(A[r2][c2]) > std::abs(A[piv][c2])) piv = r2;
                if (piv != c2) {
                    std::swap(A[piv], A[c2]);
                    det = -det;
                }
                det *= A[c2][c2];
                for (int r2 = c2 + 1; r2 < d; ++r2) {
                    Cx f = A[r2][c2] / A[c2][c2];
                    for (int c3 = c2; c3 < d; ++c3) A[r2][c3] -= f * A[c2][c3];
                }
            }
        }
        rep.jacobian_sweep.emplace_back(r, std::abs(det - 1.0));
    }

    // containment: hit one T(R2, theta2, beta2) target by Newton from the
    // asymptotic near-inverse psi ~ U, sigma_j ~ z^j
    BasinParams tight = params;
    tight.R = 4.0 * params.R;
    tight.theta = 0.5 * params.theta;
    tight.beta = 0.5 * (params.beta + 1.0 / d);
    Cx U_t = Cx{6.0 * params.R, 0.4 * params.R};
    double mod = std::pow(std::abs(U_t), -tight.beta / k) * 0.7;
    CVec zp_t(d - 1, Cx{mod, 0.0});
    CVec target(d);
    target[0] = U_t;
    for (int j = 1; j < d; ++j) target[j] = zp_t[j - 1];
    CVec z = detail::chart_from_T(U_t, zp_t, k, params.h);
    for (int it = 0; it < 24; ++it) {
        FatouEvaluation psi = fatou_psi(germ, z, params, 200000, tol);
        CVec val(d);
        val[0] = psi.value;
        for (int j = 2; j <= d; ++j)
            val[j - 1] = fatou_sigma(germ, z, j, params, 400000, tol, &psi).value;
        double res = 0;
        for (int j = 0; j < d; ++j) res = std::max(res, std::abs(val[j] - target[j]));
        rep.containment_residual = std::min(rep.containment_residual, res);
        if (res < 1e-8) break;
        // numerical Jacobian in the z coordinates
        std::vector<CVec> J(d, CVec(d));
        for (int col = 0; col < d; ++col) {
            double hstep = 1e-6 * std::max(1e-8, std::abs(z[col]));
            CVec zp2 = z, zm2 = z;
            zp2[col] += hstep;
            zm2[col] -= hstep;
            FatouEvaluation pp = fatou_psi(germ, zp2, params, 200000, tol);
            FatouEvaluation pm = fatou_psi(germ, zm2, params, 200000, tol);
            J[0][col] = (pp.value - pm.value) / (2.0 * hstep);
            for (int j = 2; j <= d; ++j) {
                Cx vp = fatou_sigma(germ, zp2, j, params, 400000, tol, &pp).value;
                Cx vm = fatou_sigma(germ, zm2, j, params, 400000, tol, &pm).value;
                J[j - 1][col] = (vp - vm) / (2.0 * hstep);
            }
        }
        // solve J dz = target - val
        CVec rhs(d);
        for (int j = 0; j < d; ++j) rhs[j] = target[j] - val[j];
        for (int c2 = 0; c2 < d; ++c2) {
            int piv = c2;
            for (int r2 = c2 + 1; r2 < d; ++r2)
                if (std::abs(J[r2][c2]) > std::abs(J[piv][c2])) piv = r2;
            std::swap(J[piv], J[c2]);
            std::swap(rhs[piv], rhs[c2]);
            for (int r2 = c2 + 1; r2 < d; ++r2) {
                Cx f = J[r2][c2] / J[c2][c2];
                for (int c3 = c2; c3 < d; ++c3) J[r2][c3] -= f * J[c2][c3];
                rhs[r2] -= f * rhs[c2];
            }
        }
        CVec dz(d);
        for (int r2 = d - 1; r2 >= 0; --r2) {
            Cx s = rhs[r2];
            for (int c3 = r2 + 1; c3 < d; ++c3) s -= J[r2][c3] * dz[c3];
            dz[r2] = s / J[r2][r2];
        }
        for (int j = 0; j < d; ++j) z[j] += dz[j];
        if (!in_basin(z, params)) break;  // stepped out; keep the best residual seen
    }
    return rep;
}

}  // namespace oneres
