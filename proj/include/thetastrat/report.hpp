#pragma once

// JSON report emission (schema "v1"): command echo, config hash, payload.
// Deterministic for a fixed config: rationals are serialized as exact
// strings, floats through a fixed-digit rendering.

#include "thetastrat/config.hpp"
#include "thetastrat/ggw.hpp"
#include "thetastrat/hnopt.hpp"
#include "thetastrat/strata.hpp"
#include "thetastrat/twindex.hpp"

#include <json.hpp>

namespace thetastrat {

using Json = nlohmann::ordered_json;

inline Json json_qvec(const QVec& v) {
    Json a = Json::array();
    for (const auto& q : v) a.push_back(to_string(q));
    return a;
}

inline Json json_qmat(const QMat& m) {
    Json rows = Json::array();
    for (int i = 0; i < m.rows; ++i) {
        Json r = Json::array();
        for (int j = 0; j < m.cols; ++j) r.push_back(to_string(m(i, j)));
        rows.push_back(r);
    }
    return rows;
}

inline Json json_monomial(const Monomial& m) {
    Json j;
    j["t"] = m.t;
    j["s"] = m.s;
    if (m.q != 0) j["q"] = to_string(m.q);
    Json z = Json::array();
    for (const auto& e : m.z) z.push_back(to_string(e));
    j["z"] = z;
    return j;
}

inline Json json_series(const TruncatedSeries& s, const Real& floor = Real("1e-18")) {
    Json terms = Json::array();
    for (const auto& [m, c] : s.terms) {
        if (c.abs() < floor) continue;
        Json t;
        t["monomial"] = json_monomial(m);
        t["re"] = c.re.str(25);
        t["im"] = c.im.str(25);
        terms.push_back(t);
    }
    return terms;
}

// debug dump of a fan: generators plus the sign-pattern provenance
inline Json json_fan(const Fan& f) {
    Json cones = Json::array();
    for (const auto& c : f.cones) {
        Json j;
        j["dim"] = c.cone_dim();
        Json rays = Json::array();
        for (const auto& r : c.rays) rays.push_back(json_qvec(r));
        j["rays"] = rays;
        Json lines = Json::array();
        for (const auto& l : c.lineality) lines.push_back(json_qvec(l));
        j["lineality"] = lines;
        Json facets = Json::array();
        for (const auto& h : c.facets) facets.push_back(json_qvec(h));
        j["facets"] = facets;
        j["provenance"] = c.provenance;
        cones.push_back(j);
    }
    Json out;
    out["ambient_dim"] = f.dim;
    out["cones"] = cones;
    return out;
}

inline Json json_datum(const IndexingDatum& nu) {
    Json j;
    j["degree"] = json_qvec(nu.degree);
    j["lambda"] = json_qvec(nu.lambda);
    j["mu_squared"] = to_string(nu.mu_sq);
    j["minimal_cone"] = nu.minimal_cone;
    j["levi_simple"] = nu.levi_simple;
    Json fixed = Json::array();
    for (const auto& w : nu.fixed_weights) fixed.push_back(json_qvec(w));
    j["fixed_x_weights"] = fixed;
    return j;
}

inline Json json_stratum_report(const StratumReport& r) {
    Json j = json_datum(r.datum);
    j["shifted_chi"] = json_qvec(r.shifted_chi);
    j["label"] = "candidate";  // necessary conditions only: never "nonempty"
    j["center_rank"] = static_cast<int>(r.datum.levi_simple.size());
    return j;
}

inline Json json_opt_result(const OptResult& r) {
    Json j;
    j["maximizer"] = json_qvec(r.maximizer);
    j["value"] = to_string(r.value);
    j["mu_squared"] = to_string(r.mu_squared);
    j["boundary"] = r.boundary;
    Json cert;
    cert["cell_choice"] = r.certificate.cell_choice;
    cert["cell_functional"] = json_qvec(r.certificate.cell_functional_ambient);
    Json rows = Json::array();
    for (const auto& c : r.certificate.constraint_rows) rows.push_back(json_qvec(c));
    cert["constraint_rows"] = rows;
    cert["active"] = r.certificate.active;
    Json mult = Json::array();
    for (const auto& m : r.certificate.multipliers) mult.push_back(to_string(m));
    cert["multipliers"] = mult;
    j["certificate"] = cert;
    return j;
}

inline Json json_ggw_values(const std::map<std::pair<int, int>, Int>& values) {
    Json j = Json::array();
    for (const auto& [ts, v] : values) {
        Json e;
        e["t"] = ts.first;
        e["s"] = ts.second;
        e["value"] = v.str();
        j.push_back(e);
    }
    return j;
}

inline Json make_report(const std::string& command, const TomlTable& raw, Json results,
                        double elapsed_ms) {
    Json j;
    j["schema"] = "v1";
    j["command"] = command;
    j["config_hash"] = config_hash(raw);
    j["config_echo"] = raw.canonical();
    j["results"] = std::move(results);
    j["timing_ms"] = elapsed_ms;
    return j;
}

}  // namespace thetastrat
