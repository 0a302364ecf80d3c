// Command-line runner: germ construction, orbit runs, basin certificates,
// Fatou coordinate evaluation, elimination, cycles, Brjuno diagnostics,
// plot datasets, and the named experiment suites.
//
// Exit codes: 0 pass, 1 assertion failure, 2 configuration error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oneres/checks.hpp"
#include "oneres/cycles.hpp"
#include "oneres/experiment.hpp"
#include "oneres/fatou.hpp"
#include "oneres/json_io.hpp"

namespace {

using namespace oneres;

struct GlobalArgs {
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::vector<std::string> tol_overrides;
};

ExperimentConfig load_config(const GlobalArgs& g) {
    ExperimentConfig cfg =
        g.config_path.empty() ? default_config() : config_from_json(read_json(g.config_path));
    if (g.seed_set) cfg.seed = g.seed;
    if (!g.out_dir.empty()) cfg.out_dir = g.out_dir;
    for (const std::string& ov : g.tol_overrides) {
        auto eq = ov.find('=');
        if (eq == std::string::npos) throw ConfigInvalid("--tol expects NAME=VAL: " + ov);
        cfg.tol[ov.substr(0, eq)] = std::stod(ov.substr(eq + 1));
    }
    cfg.validate();
    return cfg;
}

std::vector<CVec> read_points(const std::string& path, int d) {
    std::vector<CVec> pts;
    if (path.ends_with(".json")) {
        json j = read_json(path);
        for (const auto& row : j.at("points")) {
            CVec z;
            for (std::size_t i = 0; i + 1 < row.size(); i += 2)
                z.push_back(Cx{row[i].get<double>(), row[i + 1].get<double>()});
            if (static_cast<int>(z.size()) != d) throw ConfigInvalid("point dimension != d");
            pts.push_back(std::move(z));
        }
        return pts;
    }
    std::ifstream f(path);
    if (!f) throw ConfigInvalid("cannot open points file: " + path);
    std::string line;
    bool header = true;
    while (std::getline(f, line)) {
        if (header) {  // header row: re_z1,im_z1,...
            header = false;
            continue;
        }
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> vals;
        while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
        CVec z;
        for (std::size_t i = 0; i + 1 < vals.size(); i += 2) z.push_back(Cx{vals[i], vals[i + 1]});
        if (static_cast<int>(z.size()) != d) throw ConfigInvalid("point dimension != d");
        pts.push_back(std::move(z));
    }
    return pts;
}

int cmd_germ(const ExperimentConfig& cfg) {
    std::filesystem::create_directories(cfg.out_dir);
    write_json(cfg.out_dir + "/germ.json", germ_to_json(cfg.germ));
    std::cout << "germ: d=" << cfg.germ.d() << " k=" << cfg.germ.k
              << " tail terms=" << cfg.germ.tail.c.size() << " scan degree "
              << cfg.germ.mult.resonance_scan_degree << " -> " << cfg.out_dir << "/germ.json\n";
    return 0;
}

int cmd_basin(const ExperimentConfig& cfg) {
    R0Certificate cert = find_R0(cfg.germ, cfg.basin.theta, cfg.basin.beta, cfg.samples);
    std::filesystem::create_directories(cfg.out_dir);
    write_json(cfg.out_dir + "/r0_certificate.json", certificate_to_json(cert));
    std::cout << "R0 = " << cert.R0 << " (theta " << cert.theta << ", beta " << cert.beta << ", "
              << cert.samples << " samples/basin, worst drift " << cert.drift_worst << ")\n";
    return 0;
}

int cmd_orbit(const ExperimentConfig& cfg, const std::string& points_path) {
    std::filesystem::create_directories(cfg.out_dir);
    std::vector<CVec> starts;
    if (!points_path.empty())
        starts = read_points(points_path, cfg.germ.d());
    else
        starts.push_back(cfg.orbit_start);
    ExperimentConfig c2 = cfg;
    json verdicts = json::array();
    R0Certificate cert = find_R0(cfg.germ, cfg.basin.theta, cfg.basin.beta, cfg.samples);
    BasinParams certified = cfg.basin;
    certified.R = cert.R0;
    for (std::size_t i = 0; i < starts.size(); ++i) {
        c2.orbit_start = starts[i];
        std::string path = emit_plotdata(PlotKind::Orbit, c2);
        if (i + 1 < starts.size()) {
            std::filesystem::rename(path, cfg.out_dir + "/orbit_" + std::to_string(i) + ".csv");
        }
        OrbitVerdict v = classify_stable_orbit(cfg.germ, starts[i], certified, cfg.ball, cfg.n_max);
        const char* names[] = {"basin", "siegel-hyperplane", "escaped", "undecided"};
        verdicts.push_back({{"start", i},
                            {"kind", names[static_cast<int>(v.kind)]},
                            {"h", v.h},
                            {"j", v.j},
                            {"first_n", v.first_n},
                            {"steps", v.steps}});
    }
    write_json(cfg.out_dir + "/verdicts.json", verdicts);
    std::cout << verdicts.dump(2) << "\n";
    return 0;
}

int cmd_fatou(const ExperimentConfig& cfg, const std::string& points_path) {
    R0Certificate cert = find_R0(cfg.germ, cfg.basin.theta, cfg.basin.beta, cfg.samples);
    BasinParams p = cfg.basin;
    p.R = cert.R0;
    std::vector<CVec> pts;
    if (!points_path.empty())
        pts = read_points(points_path, cfg.germ.d());
    else
        for (int i = 0; i < 8; ++i) pts.push_back(sample_basin_point(p, i, 4.0, cfg.seed));
    double tol = cfg.tolerance("fatou", 1e-9);
    json out = json::array();
    for (const CVec& z : pts) {
        if (!in_basin(z, p)) {
            out.push_back({{"in_basin", false}});
            continue;
        }
        FatouEvaluation psi = fatou_psi(cfg.germ, z, p, 400000, tol);
        CVec w = cfg.germ.evaluate(z);
        FatouEvaluation psi_w = fatou_psi(cfg.germ, w, p, 400000, tol);
        json rec = {{"in_basin", true},
                    {"psi", {psi.value.real(), psi.value.imag()}},
                    {"depth", psi.depth},
                    {"est_error", psi.est_error},
                    {"abel_residual", std::abs(psi_w.value - psi.value - 1.0)}};
        for (int j = 2; j <= cfg.germ.d(); ++j) {
            FatouEvaluation sg = fatou_sigma(cfg.germ, z, j, p, 400000, tol, &psi);
            FatouEvaluation tu = tau(cfg.germ, z, j, p, 400000, tol, &psi);
            FatouEvaluation tu_w = tau(cfg.germ, w, j, p, 400000, tol, &psi_w);
            rec["sigma_" + std::to_string(j)] = {sg.value.real(), sg.value.imag()};
            rec["tau_" + std::to_string(j)] = {tu.value.real(), tu.value.imag()};
            rec["tau_residual_" + std::to_string(j)] =
                std::abs(tu_w.value - cfg.germ.mult.lambda(j - 1) * tu.value);
        }
        out.push_back(std::move(rec));
    }
    std::filesystem::create_directories(cfg.out_dir);
    write_json(cfg.out_dir + "/fatou.json", out);
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_eliminate(const ExperimentConfig& cfg, int cap) {
    NicerTailResult nt = nicer_tail_preset(cfg.germ, cap);
    std::filesystem::create_directories(cfg.out_dir);
    json j = conjugation_to_json(nt.conj);
    j["survivors"] = json::array();
    for (const auto& [idx, mag] : nt.survivors)
        j["survivors"].push_back({{"exponent", idx.e}, {"magnitude", mag}});
    j["max_offzone_abs"] = nt.max_offzone_abs;
    write_json(cfg.out_dir + "/conjugation.json", j);
    std::ofstream rep(cfg.out_dir + "/elimination_report.txt", std::ios::binary);
    rep << "elimination report (cap " << cap << ")\n"
        << "residual " << nt.conj.residual << "\n"
        << "divisor floor " << nt.conj.divisor_floor << "\n"
        << "max eliminated |g| " << nt.conj.max_eliminated_abs << "\n"
        << "survivors beyond the normal form:\n";
    for (const auto& [idx, mag] : nt.survivors) rep << "  " << idx.str() << "  " << mag << "\n";
    for (const std::string& s : nt.conj.stage_log) rep << s << "\n";
    std::cout << "residual " << nt.conj.residual << ", survivors " << nt.survivors.size()
              << ", max off-zone " << nt.max_offzone_abs << "\n";
    return 0;
}

int cmd_cycle(const ExperimentConfig& cfg, int p) {
    RootGermSpec root = make_root_germ(cfg.germ, p);
    RootVerification ver = verify_root(root);
    R0Certificate cert = find_R0(cfg.germ, cfg.basin.theta, cfg.basin.beta, cfg.samples);
    BasinParams certified = cfg.basin;
    certified.R = cert.R0;
    PermutationReport perm =
        basin_permutation_check(root, 1e-2, cfg.samples, certified, cfg.seed);
    json j = {{"p", p},
              {"mu_angles", root.mu_angles},
              {"a", {root.a.real(), root.a.imag()}},
              {"b", {root.b.real(), root.b.imag()}},
              {"max_deviation", ver.max_deviation},
              {"degree_checked", ver.degree_checked},
              {"mu_constraint_err", ver.mu_constraint_err},
              {"expected_shift", perm.expected_shift},
              {"image_of", perm.image_of},
              {"success", perm.success}};
    std::filesystem::create_directories(cfg.out_dir);
    write_json(cfg.out_dir + "/root_germ.json", j);
    std::cout << j.dump(2) << "\n";
    return perm.matches_shift && ver.max_deviation < 1e-10 ? 0 : 1;
}

int cmd_brjuno(const ExperimentConfig& cfg, int levels, int level_k) {
    ExponentSet A = ExponentSet::level_set(level_k, cfg.germ.d());
    BrjunoReport rep = brjuno_omega(cfg.germ.mult, A, levels);
    std::filesystem::create_directories(cfg.out_dir);
    write_json(cfg.out_dir + "/brjuno.json", brjuno_to_json(rep));
    for (int m = 1; m <= rep.levels; ++m)
        std::cout << "omega(2^" << m << ") = " << rep.omega[m - 1]
                  << "  S = " << rep.partial_sums[m - 1] << "  witness "
                  << rep.witnesses[m - 1].alpha.str() << "\n";
    return 0;
}

int cmd_plot(const ExperimentConfig& cfg, const std::string& kind) {
    PlotKind k;
    if (kind == "modulus")
        k = PlotKind::Modulus;
    else if (kind == "argument")
        k = PlotKind::Argument;
    else if (kind == "orbit")
        k = PlotKind::Orbit;
    else if (kind == "directions")
        k = PlotKind::Directions;
    else
        throw ConfigInvalid("plot kind must be modulus|argument|orbit|directions");
    std::cout << emit_plotdata(k, cfg) << "\n";
    return 0;
}

int cmd_suite(const ExperimentConfig& cfg, const std::string& name) {
    SuiteResult res = run_experiment(cfg, name);
    for (const CheckResult& c : res.checks)
        std::cout << (c.pass ? "PASS" : "FAIL") << "  [" << name << "] " << c.name << " -- "
                  << c.detail << "\n";
    for (const std::string& a : res.artifacts) std::cout << "wrote " << a << "\n";
    return res.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"one-resonant germ dynamics toolkit"};
    app.require_subcommand(1);
    GlobalArgs g;
    app.add_option("--config", g.config_path, "experiment config (JSON)");
    app.add_option("--out", g.out_dir, "output directory");
    auto* seed_opt = app.add_option("--seed", g.seed, "random seed");
    app.add_option("--tol", g.tol_overrides, "tolerance override NAME=VAL")->take_all();

    auto* germ = app.add_subcommand("germ", "construct and serialize the configured germ");
    auto* orbit = app.add_subcommand("orbit", "iterate orbits, write traces and verdicts");
    std::string orbit_points;
    orbit->add_option("--points", orbit_points, "start points file (CSV/JSON)");
    auto* basin = app.add_subcommand("basin", "certify an invariance radius R0");
    auto* fatou_cmd = app.add_subcommand("fatou", "evaluate Fatou coordinates on points");
    std::string fatou_points;
    fatou_cmd->add_option("--points", fatou_points, "points file (CSV/JSON)");
    auto* eliminate = app.add_subcommand("eliminate", "run the nicer-tail elimination");
    int cap = 14;
    eliminate->add_option("--cap", cap, "truncation degree");
    auto* cycle = app.add_subcommand("cycle", "build and verify a p-th root germ");
    int p = 2;
    cycle->add_option("--p", p, "cycle period (divides k)");
    auto* brjuno = app.add_subcommand("brjuno", "small-divisor diagnostics");
    int levels = 8, level_k = 1;
    brjuno->add_option("--levels", levels, "dyadic levels");
    brjuno->add_option("--level-k", level_k, "level set index k");
    auto* plot = app.add_subcommand("plot", "emit plot datasets");
    std::string kind = "modulus";
    plot->add_option("--kind", kind, "modulus|argument|orbit|directions");
    auto* suite = app.add_subcommand("suite", "run a named experiment suite");
    std::string suite_name;
    suite->add_option("--name", suite_name, "suite name")->required();

    CLI11_PARSE(app, argc, argv);
    g.seed_set = seed_opt->count() > 0;

    try {
        oneres::ExperimentConfig cfg = load_config(g);
        if (germ->parsed()) return cmd_germ(cfg);
        if (orbit->parsed()) return cmd_orbit(cfg, orbit_points);
        if (basin->parsed()) return cmd_basin(cfg);
        if (fatou_cmd->parsed()) return cmd_fatou(cfg, fatou_points);
        if (eliminate->parsed()) return cmd_eliminate(cfg, cap);
        if (cycle->parsed()) return cmd_cycle(cfg, p);
        if (brjuno->parsed()) return cmd_brjuno(cfg, levels, level_k);
        if (plot->parsed()) return cmd_plot(cfg, kind);
        if (suite->parsed()) return cmd_suite(cfg, suite_name);
    } catch (const oneres::ConfigInvalid& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const oneres::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
