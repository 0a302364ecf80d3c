#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "checks.hpp"
#include "json_io.hpp"
#include "orbit.hpp"

namespace oneres {

/// One reproducible experiment: germ, basin window, budgets, tolerances,
/// output directory, seed. A fixed seed yields byte-identical artifacts.
struct ExperimentConfig {
    GermSpec germ;
    BasinParams basin;
    long n_max = 100000;
    double ball = 0.25;
    int samples = 2000;
    std::map<std::string, double> tol;
    std::string out_dir = "out";
    std::uint64_t seed = 20260809;
    CVec orbit_start;

    double tolerance(const std::string& name, double fallback) const {
        auto it = tol.find(name);
        return it == tol.end() ? fallback : it->second;
    }
    void validate() const {
        basin.validate();
        if (n_max < 1 || samples < 1 || ball <= 0) throw ConfigInvalid("bad budgets");
        for (const auto& [k, v] : tol)
            if (!(v > 0)) throw ConfigInvalid("tolerance " + k + " must be positive");
        if (static_cast<int>(orbit_start.size()) != germ.d())
            throw ConfigInvalid("orbit start dimension != d");
    }
};

inline ExperimentConfig default_config() {
    ExperimentConfig c;
    c.germ = make_normal_form(make_multipliers(2, 1, 50), 1);
    c.basin = BasinParams{2, 1, 0, 16.0, 0.3, 0.4};
    c.orbit_start = CVec{Cx{0.05, 0.0}, Cx{0.05, 0.0}};
    return c;
}

inline ExperimentConfig config_from_json(const json& j) {
    ExperimentConfig c = default_config();
    if (j.contains("version") && j.at("version").get<int>() != 1)
        throw ConfigInvalid("unsupported config version");
    if (j.contains("germ_file"))
        c.germ = germ_from_json(read_json(j.at("germ_file").get<std::string>()));
    else if (j.contains("germ"))
        c.germ = germ_from_json(j.at("germ"));
    if (j.contains("basin")) {
        const json& bj = j.at("basin");
        c.basin = BasinParams{c.germ.d(),
                              c.germ.k,
                              bj.value("h", 0),
                              bj.value("R", 16.0),
                              bj.value("theta", 0.3),
                              bj.value("beta", 0.4)};
    } else {
        c.basin.d = c.germ.d();
        c.basin.k = c.germ.k;
    }
    c.n_max = j.value("n_max", c.n_max);
    c.ball = j.value("ball", c.ball);
    c.samples = j.value("samples", c.samples);
    c.out_dir = j.value("out", c.out_dir);
    c.seed = j.value("seed", c.seed);
    if (j.contains("tol"))
        for (const auto& [key, val] : j.at("tol").items()) c.tol[key] = val.get<double>();
    if (j.contains("orbit_start")) {
        c.orbit_start.clear();
        for (const auto& p : j.at("orbit_start"))
            c.orbit_start.push_back(Cx{p.at(0).get<double>(), p.at(1).get<double>()});
    } else if (static_cast<int>(c.orbit_start.size()) != c.germ.d()) {
        c.orbit_start.assign(c.germ.d(), Cx{0.05, 0.0});
    }
    c.validate();
    return c;
}

namespace detail {

// fixed %.17g formatting, '.' decimal, LF endings: deterministic artifacts
inline std::string csv_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct CsvWriter {
    std::ofstream f;
    explicit CsvWriter(const std::string& path) : f(path, std::ios::binary) {
        if (!f) throw ConfigInvalid("cannot open for writing: " + path);
    }
    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i)
            f << cells[i] << (i + 1 < cells.size() ? "," : "");
        f << "\n";
    }
};

}  // namespace detail

enum class PlotKind { Modulus, Argument, Orbit, Directions };

/// Writes one deterministic CSV dataset and returns its path.
inline std::string emit_plotdata(PlotKind kind, const ExperimentConfig& cfg) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);
    switch (kind) {
        case PlotKind::Modulus: {
            std::string path = cfg.out_dir + "/modulus.csv";
            PolarDataset ds = polar_sample(cfg.basin, cfg.samples, cfg.seed);
            detail::CsvWriter w(path);
            w.row({"r1", "r2"});
            for (const auto& [r1, r2] : ds.moduli)
                w.row({detail::csv_num(r1), detail::csv_num(r2)});
            return path;
        }
        case PlotKind::Argument: {
            std::string path = cfg.out_dir + "/argument.csv";
            PolarDataset ds = polar_sample(cfg.basin, cfg.samples, cfg.seed);
            detail::CsvWriter w(path);
            w.row({"s", "t", "h"});
            for (const auto& [s, t, h] : ds.arguments)
                w.row({detail::csv_num(s), detail::csv_num(t), std::to_string(h)});
            return path;
        }
        case PlotKind::Orbit: {
            std::string path = cfg.out_dir + "/orbit.csv";
            OrbitTrace tr = iterate_orbit(cfg.germ, cfg.orbit_start, cfg.n_max, cfg.ball);
            detail::CsvWriter w(path);
            std::vector<std::string> head{"n"};
            for (int j = 1; j <= cfg.germ.d(); ++j) {
                head.push_back("re_z" + std::to_string(j));
                head.push_back("im_z" + std::to_string(j));
            }
            head.insert(head.end(), {"abs_u", "arg_u", "re_U", "im_U"});
            w.row(head);
            for (const OrbitSample& s : tr.samples) {
                std::vector<std::string> cells{std::to_string(s.n)};
                for (int j = 0; j < cfg.germ.d(); ++j) {
                    cells.push_back(detail::csv_num(s.z[j].real()));
                    cells.push_back(detail::csv_num(s.z[j].imag()));
                }
                cells.push_back(detail::csv_num(std::abs(s.u)));
                cells.push_back(detail::csv_num(std::arg(s.u)));
                cells.push_back(detail::csv_num(s.U_valid ? s.U.real() : 0.0));
                cells.push_back(detail::csv_num(s.U_valid ? s.U.imag() : 0.0));
                w.row(cells);
            }
            return path;
        }
        case PlotKind::Directions: {
            std::string path = cfg.out_dir + "/directions.csv";
            RetentionSpec ret;
            ret.window_lo = std::max<long>(1, cfg.n_max / 10);
            ret.window_hi = cfg.n_max;
            ret.window_stride = std::max<long>(1, (ret.window_hi - ret.window_lo) / 20000);
            OrbitTrace tr = iterate_orbit(cfg.germ, cfg.orbit_start, cfg.n_max, cfg.ball, ret);
            detail::CsvWriter w(path);
            w.row({"n", "arg_z2", "argsum_dev"});
            double target = 2.0 * std::numbers::pi * cfg.basin.h / cfg.basin.k;
            for (std::size_t i = 0; i < tr.window_n.size(); ++i)
                w.row({std::to_string(tr.window_n[i]),
                       detail::csv_num(tr.window_args[0][i]),
                       detail::csv_num(wrap_pi(tr.window_argsum[i] - target))});
            return path;
        }
    }
    throw ConfigInvalid("unknown plot kind");
}

struct SuiteResult {
    std::string suite;
    std::vector<CheckResult> checks;
    std::vector<std::string> artifacts;
    bool ok() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

/// Named experiment suites; each wraps the acceptance checks it certifies.
/// asymptotics: rates + trichotomy; basin-invariance: invariance/disjointness;
/// fatou-equations: Abel + tau/cylinder; elimination: solver, nicer tail,
/// majorants; cycles: root germs; brjuno: divisor diagnostics; atlas: the
/// polar decomposition datasets.
inline SuiteResult run_experiment(const ExperimentConfig& cfg, const std::string& which) {
    cfg.validate();
    AcceptanceBudgets b;
    b.seed = cfg.seed;
    b.tol_abel = cfg.tolerance("abel", b.tol_abel);
    b.tol_asym_dev = cfg.tolerance("asym_dev", b.tol_asym_dev);
    b.tol_linearization = cfg.tolerance("linearization", b.tol_linearization);
    b.invariance_samples = cfg.samples;
    b.trichotomy_nmax = cfg.n_max;
    SuiteResult out;
    out.suite = which;
    if (which == "atlas") {
        out.artifacts.push_back(emit_plotdata(PlotKind::Modulus, cfg));
        out.artifacts.push_back(emit_plotdata(PlotKind::Argument, cfg));
        // schema and ribbon-width audit
        PolarDataset ds = polar_sample(cfg.basin, cfg.samples, cfg.seed);
        CheckResult c{0, "atlas: ribbon width below theta and W-compatible moduli"};
        bool ok = true;
        for (const auto& [s, t, h] : ds.arguments) {
            double dev = std::abs(wrap_pi(s + t - 2.0 * std::numbers::pi * h / cfg.basin.k));
            if (dev >= cfg.basin.theta) ok = false;
        }
        for (const auto& [r1, r2] : ds.moduli) {
            if (!(std::pow(r1, (1.0 - cfg.basin.beta) / cfg.basin.beta) < r2 &&
                  r2 < std::pow(r1, cfg.basin.beta / (1.0 - cfg.basin.beta))))
                ok = false;
        }
        c.pass = ok;
        c.detail = std::to_string(ds.moduli.size()) + " modulus rows, " +
                   std::to_string(ds.arguments.size()) + " argument rows";
        out.checks.push_back(c);
        return out;
    }
    StandardSetup setup = make_standard_setup(std::min(cfg.samples, 2000));
    if (which == "asymptotics") {
        out.checks.push_back(check_orbit_asymptotics(setup, b));
        out.checks.push_back(check_trichotomy(setup, b));
    } else if (which == "basin-invariance") {
        out.checks.push_back(check_basin_invariance(setup, b));
    } else if (which == "fatou-equations") {
        out.checks.push_back(check_abel_equation(setup, b));
        out.checks.push_back(check_tau_cylinder(setup, b));
    } else if (which == "elimination") {
        out.checks.push_back(check_elimination(setup, b));
        out.checks.push_back(check_nicer_tail(setup, b));
        out.checks.push_back(check_majorants(setup, b));
    } else if (which == "cycles") {
        out.checks.push_back(check_root_germ(setup, b));
    } else if (which == "brjuno") {
        out.checks.push_back(check_brjuno(setup, b));
    } else {
        throw ConfigInvalid("unknown suite: " + which);
    }
    return out;
}

}  // namespace oneres
