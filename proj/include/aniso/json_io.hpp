#pragma once

// JSON serialization of the result types (nlohmann::json) and the run
// manifest. Numbers survive a round trip: nlohmann prints shortest-exact
// doubles.

#include <json.hpp>

#include <chrono>
#include <string>

#include "aniso/contour.hpp"
#include "aniso/estimators.hpp"
#include "aniso/inversion_hd.hpp"
#include "aniso/isotropy_test.hpp"
#include "aniso/lkc.hpp"
#include "aniso/palm_stats.hpp"

namespace aniso {

inline constexpr const char* kToolVersion = "0.1.0";

using json = nlohmann::json;

inline json to_json(const PalmSummary& s) {
  json cov = json::array();
  for (int i = 0; i < s.normal_cov.d; ++i) {
    json row = json::array();
    for (int j = 0; j < s.normal_cov.d; ++j) row.push_back(s.normal_cov(i, j));
    cov.push_back(row);
  }
  return json{{"total_length", s.total_length},
              {"C", s.C},
              {"S", s.S},
              {"normal_cov", cov},
              {"n_points", s.n_points}};
}

inline json to_json(const CellStats& cells) {
  json arr = json::array();
  for (const auto& c : cells.cells)
    arr.push_back(json{{"C", c.C}, {"S", c.S}, {"length", c.length}});
  return json{{"grid_n", cells.grid_n}, {"cells", arr}};
}

inline json to_json(const LKCSummary& s) {
  return json{{"area_fraction", s.area_fraction},
              {"boundary_length", s.boundary_length},
              {"euler_char", s.euler_char},
              {"w_hat", s.w_hat},
              {"window_area", s.window_area}};
}

inline json to_json(const IsotropyTestResult& r) {
  return json{{"Q", r.Q},
              {"V2_hat", r.V2_hat},
              {"N", r.N},
              {"p_value", r.p_value},
              {"n_nonempty_cells", r.n_nonempty_cells}};
}

inline json to_json(const AnisotropyEstimate& e) {
  json out{{"method", method_name(e.method)},
           {"kappa", e.kappa},
           {"theta0", e.theta0},
           {"F_stat", e.F_stat}};
  if (!e.kappa_vec.empty()) out["kappa_vec"] = e.kappa_vec;
  if (!e.direction.empty()) out["direction"] = e.direction;
  if (!e.diagnostics.empty()) out["diagnostics"] = e.diagnostics;
  return out;
}

inline json to_json(const GDReport& r) {
  return json{{"n_iterations", r.n_iterations},
              {"step", r.step},
              {"alpha", r.alpha},
              {"beta", r.beta},
              {"Q", r.Q},
              {"converged", r.converged},
              {"final_residual", r.final_residual},
              {"trace_iterations", r.iterate_index},
              {"trace", r.iterates}};
}

inline json to_json(const ContourSet& set) {
  json paths = json::array();
  for (const auto& p : set.paths) {
    json verts = json::array();
    for (const auto& v : p.vertices) verts.push_back(json::array({v[0], v[1]}));
    paths.push_back(json{{"closed", p.closed}, {"vertices", verts}});
  }
  json points = json::array();
  for (const auto& pt : set.points) {
    points.push_back(json{{"position", json::array({pt.position[0], pt.position[1]})},
                          {"normal", json::array({pt.normal[0], pt.normal[1]})},
                          {"path_index", pt.path_index},
                          {"seg_length", pt.seg_length}});
  }
  return json{{"level", set.level},
              {"total_length", set.total_length},
              {"paths", paths},
              {"points", points}};
}

/// Run manifest: enough to replay the command and reproduce outputs
/// bit-exactly (the timestamp is informational).
inline json make_manifest(const std::string& command, const json& config, std::uint64_t seed) {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return json{{"command", command},
              {"config", config},
              {"seed", seed},
              {"tool_version", kToolVersion},
              {"timestamp", buf}};
}

}  // namespace aniso
