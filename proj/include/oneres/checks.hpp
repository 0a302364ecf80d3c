#pragma once

#include <chrono>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "basin.hpp"
#include "brjuno.hpp"
#include "cycles.hpp"
#include "elimination.hpp"
#include "fatou.hpp"
#include "germ.hpp"
#include "majorant.hpp"
#include "orbit.hpp"
#include "sampling.hpp"

namespace oneres {

struct CheckResult {
    int id = 0;
    std::string name;
    bool pass = false;
    double seconds = 0;
    std::string detail;
};

struct AcceptanceBudgets {
    int cert_samples = 2000;
    int abel_points = 1000;        // split across the three germs
    double tol_abel = 1e-6;
    int asym_starts = 20;          // per sector
    long asym_n = 100000;
    double tol_asym_dev = 0.02;
    int invariance_samples = 10000;  // per basin
    int elim_cap = 12;
    int nicer_cap = 14;
    int sigma_rmax = 20;
    int perm_samples = 1000;
    int tau_samples = 60;
    double tol_linearization = 1e-6;
    int trichotomy_starts = 10000;
    long trichotomy_nmax = 100000;
    double trichotomy_ball = 0.25;
    double trichotomy_start_radius = 0.2;
    std::uint64_t seed = 20260809;
    double abel_budget_seconds = 30.0;
    double asym_budget_seconds = 60.0;
};

/// The pinned experiment family: d = 2 sqrt(2)-multipliers, k in {1, 2},
/// the order-6 perturbations, and their certified basins.
struct StandardSetup {
    GermSpec nf_k1, nf_k2, pert_k1, elim_germ;
    BasinParams basin_k1, basin_k2, basin_pert, detect_k1;
    R0Certificate cert_k1, cert_k2, cert_pert, cert_detect;
};

inline SeriesMap monomial_tail(int d, std::vector<std::tuple<MultiIndex, int, Cx>> terms) {
    int cap = 0;
    for (auto& [idx, comp, val] : terms) cap = std::max(cap, idx.degree());
    SeriesMap m(d, cap);
    for (auto& [idx, comp, val] : terms) m.set(idx, comp, val);
    return m;
}

inline StandardSetup make_standard_setup(int cert_samples = 2000) {
    StandardSetup s;
    Multipliers m1 = make_multipliers(2, 1, 50);
    Multipliers m2 = make_multipliers(2, 2, 50);
    s.nf_k1 = make_normal_form(m1, 1);
    s.nf_k2 = make_normal_form(m2, 2);
    s.pert_k1 = make_perturbed(s.nf_k1, monomial_tail(2, {{MultiIndex{3, 3}, 0, Cx{1e-2, 0.0}}}), 6);
    s.elim_germ = make_perturbed(
        s.nf_k1,
        monomial_tail(2, {{MultiIndex{6, 0}, 0, Cx{1e-2, 0.0}}, {MultiIndex{5, 1}, 1, Cx{2e-2, 0.0}}}),
        6);
    s.cert_k1 = find_R0(s.nf_k1, 0.3, 0.4, cert_samples);
    s.cert_k2 = find_R0(s.nf_k2, 0.3, 0.4, cert_samples);
    s.cert_pert = find_R0(s.pert_k1, 0.3, 0.45, cert_samples);
    s.cert_detect = find_R0(s.nf_k1, 0.3, 0.2, cert_samples);
    s.basin_k1 = BasinParams{2, 1, 0, s.cert_k1.R0, 0.3, 0.4};
    s.basin_k2 = BasinParams{2, 2, 0, s.cert_k2.R0, 0.3, 0.4};
    s.basin_pert = BasinParams{2, 1, 0, s.cert_pert.R0, 0.3, 0.45};
    s.detect_k1 = BasinParams{2, 1, 0, s.cert_detect.R0, 0.3, 0.2};
    return s;
}

namespace detail {

struct Stopwatch {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

inline std::string fmt(double v) {
    std::ostringstream os;
    os.precision(4);
    os << v;
    return os.str();
}

/// Basin start with bounded anisotropy and moderate depth, for rate checks.
inline CVec asymptotics_start(const BasinParams& p, Rng& rng, double R0) {
    for (int tries = 0; tries < 256; ++tries) {
        double U = rng.uniform(1.5 * R0, 250.0);
        double delta = rng.uniform(-0.4, 0.4) * p.theta;
        double au = std::pow(1.0 / U, 1.0 / p.k);
        double aru = 2.0 * std::numbers::pi * p.h / p.k + delta / p.k;
        Cx u = au * unit_phase(aru / (2.0 * std::numbers::pi));
        CVec z(p.d);
        double aniso = rng.uniform(0.85, 1.18);
        Cx prod = 1.0;
        for (int j = 1; j < p.d; ++j) {
            double mod = std::pow(au, 1.0 / p.d) * (j == 1 ? aniso : 1.0);
            double ang = 2.0 * std::numbers::pi * rng.uniform(0.0, 1.0);
            z[j] = mod * unit_phase(ang / (2.0 * std::numbers::pi));
            prod *= z[j];
        }
        z[0] = u / prod;
        if (in_basin(z, p)) return z;
    }
    throw NotInBasin("asymptotics_start: sampler failed to land in the basin");
}

}  // namespace detail

// --- criterion 1: Fatou-coordinate Abel equation -------------------------

inline CheckResult check_abel_equation(const StandardSetup& s, const AcceptanceBudgets& b) {
    detail::Stopwatch sw;
    CheckResult r{1, "fatou Abel equation |psi(F z) - psi(z) - 1| < 1e-6"};
    double worst = 0;
    long points = 0;
    struct Case {
        const GermSpec* g;
        const BasinParams* p;
    } cases[] = {{&s.nf_k1, &s.basin_k1}, {&s.nf_k2, &s.basin_k2}, {&s.pert_k1, &s.basin_pert}};
    int per_case = (b.abel_points + 2) / 3;
    for (const auto& cs : cases) {
        for (int h = 0; h < cs.g->k; ++h) {
            BasinParams ph = cs.p->with_h(h);
            for (int i = 0; i < per_case / cs.g->k; ++i) {
                CVec z = sample_basin_point(ph, static_cast<std::uint64_t>(i), 5.0, b.seed);
                if (!in_basin(z, ph)) continue;
                CVec w = cs.g->evaluate(z);
                FatouEvaluation a = fatou_psi(*cs.g, z, ph, 200000, 1e-9);
                FatouEvaluation c = fatou_psi(*cs.g, w, ph, 200000, 1e-9);
                double res = std::abs(c.value - a.value - 1.0);
                worst = std::max(worst, res);
                ++points;
            }
        }
    }
    r.seconds = sw.seconds();
    r.pass = worst < b.tol_abel && points >= b.abel_points * 9 / 10 &&
             r.seconds < b.abel_budget_seconds;
    r.detail = "worst residual " + detail::fmt(worst) + " over " + std::to_string(points) +
               " points, " + detail::fmt(r.seconds) + " s";
    return r;
}

// --- criterion 2: orbit asymptotics --------------------------------------

inline CheckResult check_orbit_asymptotics(const StandardSetup& s, const AcceptanceBudgets& b) {
    detail::Stopwatch sw;
    CheckResult r{2, "orbit rates n^{1/k} u_n and |z_n^j| n^{1/(kd)}"};
    double worst_dev = 0, worst_lo = 1e300, worst_hi = 0;
    Rng rng(b.seed + 2);
    struct Case {
        const GermSpec* g;
        const BasinParams* p;
        double R0;
    } cases[] = {{&s.nf_k1, &s.basin_k1, s.cert_k1.R0}, {&s.nf_k2, &s.basin_k2, s.cert_k2.R0}};
    for (const auto& cs : cases) {
        for (int h = 0; h < cs.g->k; ++h) {
            BasinParams ph = cs.p->with_h(h);
            for (int i = 0; i < b.asym_starts; ++i) {
                CVec z0 = detail::asymptotics_start(ph, rng, cs.R0);
                OrbitTrace tr = iterate_orbit(*cs.g, z0, b.asym_n, 10.0);
                AsymptoticsReport rep = check_asymptotics(tr, h, 1000);
                worst_dev = std::max(worst_dev, rep.dev_at_end);
                for (int j = 0; j < cs.g->d(); ++j) {
                    worst_lo = std::min(worst_lo, rep.ratio_min[j]);
                    worst_hi = std::max(worst_hi, rep.ratio_max[j]);
                }
            }
        }
    }
    r.seconds = sw.seconds();
    r.pass = worst_dev < b.tol_asym_dev && worst_lo >= 0.5 && worst_hi <= 2.0 &&
             r.seconds < b.asym_budget_seconds;
    r.detail = "max |n^{1/k}u_n - zeta| = " + detail::fmt(worst_dev) + ", ratio range [" +
               detail::fmt(worst_lo) + ", " + detail::fmt(worst_hi) + "], " +
               detail::fmt(r.seconds) + " s";
    return r;
}

// --- criterion 3: basin invariance and disjointness ----------------------

inline CheckResult check_basin_invariance(const StandardSetup& s, const AcceptanceBudgets& b) {
    detail::Stopwatch sw;
    CheckResult r{3, "certified basins map into themselves; k = 2 sectors disjoint"};
    long total = 0, good = 0, cross = 0;
    struct Case {
        const GermSpec* g;
        const BasinParams* p;
    } cases[] = {{&s.nf_k2, &s.basin_k2}, {&s.pert_k1, &s.basin_pert}};
    for (const auto& cs : cases) {
        for (int h = 0; h < cs.g->k; ++h) {
            BasinParams ph = cs.p->with_h(h);
            for (int i = 0; i < b.invariance_samples; ++i) {
                CVec z = sample_basin_point(ph, static_cast<std::uint64_t>(i), 6.0, b.seed + 3);
                if (!in_basin(z, ph)) continue;
                ++total;
                if (in_basin(cs.g->evaluate(z), ph)) ++good;
                for (int hh = 0; hh < cs.g->k; ++hh)
                    if (hh != h && in_basin(z, cs.p->with_h(hh))) ++cross;
            }
        }
    }
    r.seconds = sw.seconds();
    r.pass = total > 0 && good == total && cross == 0;
    r.detail = std::to_string(good) + "/" + std::to_string(total) +
               " samples invariant, cross-membership " + std::to_string(cross);
    return r;
}

// --- criterion 4: elimination correctness ---------------------------------

inline CheckResult check_elimination(const StandardSetup& s, const AcceptanceBudgets& b) {
    detail::Stopwatch sw;
    CheckResult r{4, "homological elimination through degree 12"};
    const int cap = b.elim_cap;
    SeriesMap F = s.elim_germ.to_series(cap);
    ExponentSet A0 = ExponentSet::low_order(5);
    std::vector<ExponentSet> levels = {ExponentSet::min_level(0, 5), ExponentSet::min_level(1, 5)};
    ConjugationResult conj =
        iterated_elimination(F, s.elim_germ.mult.angles, A0, levels, cap);
    double pointwise = 0;
    Rng rng(b.seed + 4);
    for (int i = 0; i < 100; ++i) {
        CVec z(2);
        for (int j = 0; j < 2; ++j)
            z[j] = Cx{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)} * 7e-3;
        CVec hg = evaluate(conj.H, evaluate(conj.G, z));
        CVec fh = evaluate(F, evaluate(conj.H, z));
        for (int j = 0; j < 2; ++j) pointwise = std::max(pointwise, std::abs(hg[j] - fh[j]));
    }
    r.seconds = sw.seconds();
    r.pass = conj.max_eliminated_abs < 1e-10 && conj.residual < 1e-9 && pointwise < 1e-8;
    r.detail = "max |g| on eliminated " + detail::fmt(conj.max_eliminated_abs) + ", residual " +
               detail::fmt(conj.residual) + ", pointwise " + detail::fmt(pointwise);
    return r;
}

// --- criterion 5: nicer tail ----------------------------------------------

inline CheckResult check_nicer_tail(const StandardSetup& s, const AcceptanceBudgets& b) {
    detail::Stopwatch sw;
    CheckResult r{5, "nicer-tail preset leaves only exponents >= (6,6)"};
    NicerTailResult nt = nicer_tail_preset(s.pert_k1, b.nicer_cap);
    r.seconds = sw.seconds();
    r.pass = nt.offzone_clean(1e-10);
    std::string surv;
    for (const auto& [idx, mag] : nt.survivors) surv += idx.str() + " ";
    r.detail = "survivors: " + (surv.empty() ? "none" : surv) + "max off-zone " +
               detail::fmt(nt.max_offzone_abs) + ", residual " + detail::fmt(nt.conj.residual);
    return r;
}

// --- criterion 6: majorant identities --------------------------------------

inline CheckResult check_majorants(const StandardSetup& s, const AcceptanceBudgets& b) {
    detail::Stopwatch sw;
    CheckResult r{6, "sigma recursion vs closed form; divisor-tree counting bound"};
    const int cap = b.elim_cap;
    SeriesMap F = s.elim_germ.to_series(cap);
    ExponentSet A0 = ExponentSet::low_order(5);
    std::vector<ExponentSet> levels = {ExponentSet::min_level(0, 5), ExponentSet::min_level(1, 5)};
    ConjugationResult conj = iterated_elimination(F, s.elim_germ.mult.angles, A0, levels, cap);
    ExponentSet A = ExponentSet::custom(
        [cap](const MultiIndex& a) {
            return a.degree() >= 6 && a.degree() <= cap && a.min_entry() <= 1;
        },
        "min<=1,6..cap");
    MajorantReport rep = majorant_diagnostics(2, b.sigma_rmax, &conj, &A);
    r.seconds = sw.seconds();
    r.pass = rep.sigma_max_rel_err < 1e-10 && rep.counting_ok && rep.h_bound_ok && rep.growth_ok;
    r.detail = "sigma rel err " + detail::fmt(rep.sigma_max_rel_err) + ", counting " +
               (rep.counting_ok ? "ok" : "violated " + rep.detail) + ", ||h|| bound margin " +
               detail::fmt(rep.h_bound_worst_margin);
    return r;
}

// --- criterion 7: root germ ------------------------------------------------

inline CheckResult check_root_germ(const StandardSetup& s, const AcceptanceBudgets& b) {
    detail::Stopwatch sw;
    CheckResult r{7, "p-th root germ: composed square and basin permutation"};
    RootGermSpec root = make_root_germ(s.nf_k2, 2);
    RootVerification ver = verify_root(root);
    PermutationReport perm = basin_permutation_check(root, 1e-2, b.perm_samples, s.basin_k2,
                                                     b.seed + 7);
    r.seconds = sw.seconds();
    bool perm_ok = perm.matches_shift;
    for (double v : perm.success) perm_ok = perm_ok && v == 1.0;
    r.pass = ver.max_deviation < 1e-12 && perm_ok;
    std::string images;
    for (int h = 0; h < static_cast<int>(perm.image_of.size()); ++h)
        images += std::to_string(h) + "->" + std::to_string(perm.image_of[h]) + " ";
    r.detail = "coefficient deviation " + detail::fmt(ver.max_deviation) + " through degree " +
               std::to_string(ver.degree_checked) + "; permutation " + images;
    return r;
}

// --- criterion 8: tau linearization and cylinder model ---------------------

inline CheckResult check_tau_cylinder(const StandardSetup& s, const AcceptanceBudgets& b) {
    detail::Stopwatch sw;
    CheckResult r{8, "tau(F) = lambda tau and eta conjugates to the unit translation"};
    const GermSpec& g = s.nf_k1;
    BasinParams p = s.basin_k1;
    double worst_tau = 0, worst_sigma = 0, worst_cyl = 0;
    int used = 0;
    for (int i = 0; i < b.tau_samples * 4 && used < b.tau_samples; ++i) {
        // band with |Im psi| small: eta grows like e^{|Im zeta| |Arg lambda|}
        double t = halton(i + 1, 2), v = halton(i + 1, 3), wmod = halton(i + 1, 5);
        Cx U{p.R * (2.0 + 6.0 * t), 1.6 * (v - 0.5)};
        double lo = std::pow(std::abs(U), (p.beta - 1.0) / p.k);
        double hi = std::pow(std::abs(U), -p.beta / p.k);
        CVec zp(1, Cx{lo * std::pow(hi / lo, 0.25 + 0.5 * wmod), 0.0});
        CVec z = detail::chart_from_T(U, zp, g.k, p.h);
        if (!in_basin(z, p)) continue;
        ++used;
        CVec w = g.evaluate(z);
        FatouEvaluation psi_z = fatou_psi(g, z, p, 400000, 1e-10);
        FatouEvaluation psi_w = fatou_psi(g, w, p, 400000, 1e-10);
        for (int j = 2; j <= g.d(); ++j) {
            FatouEvaluation sig_z = fatou_sigma(g, z, j, p, 400000, 1e-10, &psi_z);
            FatouEvaluation sig_w = fatou_sigma(g, w, j, p, 400000, 1e-10, &psi_w);
            BranchLog bl;
            Cx ratio = detail::principal_root(psi_z.value / (psi_z.value + 1.0), g.k * g.d(), bl);
            worst_sigma = std::max(worst_sigma,
                                   std::abs(sig_w.value - g.mult.lambda(j - 1) * sig_z.value * ratio));
            FatouEvaluation tau_z = tau(g, z, j, p, 400000, 1e-10, &psi_z);
            FatouEvaluation tau_w = tau(g, w, j, p, 400000, 1e-10, &psi_w);
            worst_tau = std::max(worst_tau,
                                 std::abs(tau_w.value - g.mult.lambda(j - 1) * tau_z.value));
        }
        GlobalCoordinate gz = global_coordinate(g, z, p, 1000, 400000, 1e-10, 0);
        GlobalCoordinate gw = global_coordinate(g, w, p, 1000, 400000, 1e-10, 0);
        CylinderPoint ez = cylinder_conjugation(gz.point, g.mult);
        CylinderPoint ew = cylinder_conjugation(gw.point, g.mult);
        double dev = std::abs(ew.zeta - ez.zeta - 1.0);
        for (std::size_t q = 0; q < ez.xi.size(); ++q)
            dev = std::max(dev, std::abs(ew.xi[q] - ez.xi[q]));
        worst_cyl = std::max(worst_cyl, dev);
    }
    r.seconds = sw.seconds();
    r.pass = used >= b.tau_samples / 2 && worst_tau < b.tol_linearization &&
             worst_sigma < b.tol_linearization && worst_cyl < b.tol_linearization;
    r.detail = "tau residual " + detail::fmt(worst_tau) + ", sigma residual " +
               detail::fmt(worst_sigma) + ", cylinder dev " + detail::fmt(worst_cyl) + " on " +
               std::to_string(used) + " samples";
    return r;
}

// --- criterion 9: Brjuno diagnostics ----------------------------------------

inline CheckResult check_brjuno(const StandardSetup& s, const AcceptanceBudgets& b) {
    detail::Stopwatch sw;
    CheckResult r{9, "omega scan dual route; increment decay; resonant set rejected"};
    (void)s;
    // dual route on the d = 2 level set A_1
    ExponentSet A1 = ExponentSet::level_set(1, 2);
    Multipliers m2 = make_multipliers(2, 1, 50);
    BrjunoReport rep2 = brjuno_omega(m2, A1, 8);
    double route_err = 0;
    {
        CVec lam = m2.lambdas();
        for (int m = 1; m <= 8; ++m) {
            int cap = 1 << m;
            double best = 1.0;
            for_each_index(2, 2, cap, [&](const MultiIndex& a) {
                if (!A1.contains(a)) return;
                Cx pw = 1.0;  // plain repeated multiplication, the independent route
                for (int j = 0; j < 2; ++j)
                    for (int t = 0; t < a[j]; ++t) pw *= lam[j];
                for (int i = 0; i < 2; ++i) best = std::min(best, std::abs(pw - lam[i]));
            });
            route_err = std::max(route_err, std::abs(best - rep2.omega[m - 1]));
        }
    }
    // increment decay over m = 3..8 for the first-primes d = 3 multipliers
    Multipliers m3 = make_multipliers(3, 1, 40);
    BrjunoReport rep3 = brjuno_omega(m3, ExponentSet::level_set(1, 3), 8);
    bool decay = rep3.increments_decrease(3, 8);
    // a deliberately resonant set must be rejected
    bool rejected = false;
    try {
        ExponentSet bad = ExponentSet::explicit_set({MultiIndex{2, 1}}, "resonant");
        brjuno_omega(m2, bad, 2);
    } catch (const ZeroDivisor&) {
        rejected = true;
    }
    r.seconds = sw.seconds();
    r.pass = route_err < 1e-12 && decay && rejected;
    std::string incs;
    for (int m = 3; m <= 8; ++m) incs += detail::fmt(rep3.increments[m - 1]) + " ";
    r.detail = "route agreement " + detail::fmt(route_err) + "; d=3 increments " + incs +
               (decay ? "(decreasing)" : "(NOT decreasing)") +
               (rejected ? "; resonant set rejected" : "; resonant set NOT rejected");
    return r;
}

// --- criterion 10: stable-orbit trichotomy ----------------------------------

inline CheckResult check_trichotomy(const StandardSetup& s, const AcceptanceBudgets& b) {
    detail::Stopwatch sw;
    CheckResult r{10, "trichotomy with zero undecided; direction accumulation"};
    const GermSpec& g = s.nf_k1;
    Rng rng(b.seed + 10);
    long counts[4] = {0, 0, 0, 0};
    for (int i = 0; i < b.trichotomy_starts; ++i) {
        CVec z(2);
        double n2;
        do {
            for (int j = 0; j < 2; ++j)
                z[j] = Cx{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)} *
                       b.trichotomy_start_radius;
            n2 = std::norm(z[0]) + std::norm(z[1]);
        } while (n2 > b.trichotomy_start_radius * b.trichotomy_start_radius);
        OrbitVerdict v =
            classify_stable_orbit(g, z, s.detect_k1, b.trichotomy_ball, b.trichotomy_nmax);
        counts[static_cast<int>(v.kind)]++;
    }
    // direction diagnostics on one deep orbit
    RetentionSpec ret;
    ret.window_lo = 10000;
    ret.window_hi = b.trichotomy_nmax;
    OrbitTrace tr = iterate_orbit(g, CVec{Cx{0.05, 0.0}, Cx{0.05, 0.0}}, b.trichotomy_nmax, 10.0,
                                  ret);
    DirectionReport dir = direction_accumulation(tr, 0);
    r.seconds = sw.seconds();
    long undecided = counts[static_cast<int>(OrbitClass::Undecided)];
    r.pass = undecided == 0 && dir.argsum_dev_end < 1e-2 && dir.max_gap < 0.1 &&
             dir.span_condition < 1e3;
    r.detail = "basin " + std::to_string(counts[0]) + ", hyperplane " + std::to_string(counts[1]) +
               ", escaped " + std::to_string(counts[2]) + ", undecided " +
               std::to_string(undecided) + "; argsum dev " + detail::fmt(dir.argsum_dev_end) +
               ", max gap " + detail::fmt(dir.max_gap) + ", span cond " +
               detail::fmt(dir.span_condition);
    return r;
}

inline std::vector<CheckResult> run_all_criteria(const StandardSetup& s,
                                                 const AcceptanceBudgets& b) {
    return {check_abel_equation(s, b), check_orbit_asymptotics(s, b),
            check_basin_invariance(s, b), check_elimination(s, b),
            check_nicer_tail(s, b), check_majorants(s, b),
            check_root_germ(s, b), check_tau_cylinder(s, b),
            check_brjuno(s, b), check_trichotomy(s, b)};
}

}  // namespace oneres
