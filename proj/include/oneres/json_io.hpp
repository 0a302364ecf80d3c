#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "basin.hpp"
#include "brjuno.hpp"
#include "elimination.hpp"
#include "errors.hpp"
#include "germ.hpp"
#include "series.hpp"

namespace oneres {

using json = nlohmann::json;

// monomial-list schema shared by germ tails and general series:
// [{"exponent": [..], "component": 1-based, "re": x, "im": y}, ...]
inline json series_to_json(const SeriesMap& m) {
    json terms = json::array();
    for (const auto& [idx, v] : m.c)
        for (int j = 0; j < m.vars; ++j) {
            if (v[j] == Cx{}) continue;
            terms.push_back({{"exponent", idx.e},
                             {"component", j + 1},
                             {"re", v[j].real()},
                             {"im", v[j].imag()}});
        }
    return {{"d", m.vars}, {"degree_cap", m.cap}, {"terms", std::move(terms)}};
}

inline SeriesMap series_from_json(const json& j) {
    SeriesMap m(j.at("d").get<int>(), j.value("degree_cap", 0));
    int max_deg = 0;
    for (const auto& t : j.at("terms")) {
        MultiIndex idx(t.at("exponent").get<std::vector<int>>());
        if (idx.dim() != m.vars) throw ConfigInvalid("series term dimension mismatch");
        int comp = t.at("component").get<int>();
        if (comp < 1 || comp > m.vars) throw ConfigInvalid("series component out of range");
        max_deg = std::max(max_deg, idx.degree());
        if (m.cap < max_deg) m.cap = max_deg;
        m.add(idx, comp - 1, Cx{t.at("re").get<double>(), t.value("im", 0.0)});
    }
    return m;
}

inline json germ_to_json(const GermSpec& g) {
    json tail = series_to_json(g.tail).at("terms");
    return {{"d", g.d()},     {"k", g.k},
            {"l", g.l},       {"angles", g.mult.angles},
            {"tail", tail},   {"scan_degree", g.mult.resonance_scan_degree},
            {"test_mode", g.mult.test_mode}};
}

inline GermSpec germ_from_json(const json& j) {
    int d = j.at("d").get<int>();
    int k = j.at("k").get<int>();
    Multipliers mult =
        make_multipliers(d, j.at("angles").get<std::vector<double>>(), k,
                         j.value("scan_degree", 50), j.value("test_mode", false));
    GermSpec g = make_normal_form(mult, k);
    if (j.contains("tail") && !j.at("tail").empty()) {
        json tj = {{"d", d}, {"degree_cap", 0}, {"terms", j.at("tail")}};
        SeriesMap tail = series_from_json(tj);
        g = make_perturbed(g, tail, j.value("l", 2 * k * d + 2));
    } else if (j.contains("l")) {
        g.l = j.at("l").get<int>();
    }
    return g;
}

inline json conjugation_to_json(const ConjugationResult& r) {
    return {{"H", series_to_json(r.H)},
            {"G", series_to_json(r.G)},
            {"cap", r.cap},
            {"residual", r.residual},
            {"divisor_floor", r.divisor_floor},
            {"divisor_floor_scanned", r.divisor_floor_scanned},
            {"max_eliminated_abs", r.max_eliminated_abs},
            {"stages", r.stage_log}};
}

inline json certificate_to_json(const R0Certificate& c) {
    return {{"R0", c.R0},
            {"theta", c.theta},
            {"beta", c.beta},
            {"samples", c.samples},
            {"min_margin_per_h", c.min_margin_per_h},
            {"drift_worst", c.drift_worst},
            {"tested_R", c.tested_R},
            {"passed", c.passed}};
}

inline json brjuno_to_json(const BrjunoReport& r) {
    json w = json::array();
    for (const auto& x : r.witnesses)
        w.push_back({{"alpha", x.alpha.e}, {"component", x.comp + 1}, {"value", x.value}});
    return {{"levels", r.levels},
            {"omega", r.omega},
            {"partial_sums", r.partial_sums},
            {"increments", r.increments},
            {"witnesses", std::move(w)}};
}

inline void write_json(const std::string& path, const json& j) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigInvalid("cannot open for writing: " + path);
    f << j.dump(2) << "\n";
}

inline json read_json(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigInvalid("cannot open: " + path);
    return json::parse(f);
}

}  // namespace oneres
