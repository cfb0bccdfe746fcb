#pragma once

// JSON scenario and sweep files.
//
// Scenario file:
//   {
//     "name": "fig2_full",
//     "params":      { "omega_0", "omega_1", "kappa", "gamma_0", "gamma_1",
//                      "g_0", "g_1", "delta_0", "n_th_0", "n_th_1" },
//     "drives":      { "a_l_0", "a_l_p1", "a_l_m1", "omega_l_mod",
//                      "a_v_0", "a_v_p1", "a_v_m1", "omega_v_mod" },
//     "spring":      { "theta_0", "theta_1",
//                      "spring_mod_scope": "both" | "fluctuations_only" },
//     "integration": { "dt" | "steps_per_period", "t_end" | "periods",
//                      "record_stride", "divergence_threshold",
//                      "initial_condition": "carrier_steady" | "vacuum" },
//     "window":      { "begin", "end" } | { "last_periods" }
//   }
// Every field is optional; omitted fields keep the Fig. 2 defaults. Unknown
// keys are rejected. All numbers are in units of omega_0 (time in 1/omega_0).
//
// Sweep file:
//   {
//     "name": "fig3_g1",
//     "base": { ...scenario... } | "base_file": "fig2_full.json",
//     "axes": [ { "parameter": "g_1", "values": [ ... ] }
//             | { "parameter": "theta_1", "start", "stop", "count",
//                 "full_count" } ],
//     "full_resolution": false,
//     "ratio_convention": "fixed_minus" | "constant_sum"
//   }

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "oem/harness.hpp"

namespace oem {

/// Malformed or inconsistent configuration file.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

namespace config_detail {

using json = nlohmann::json;

inline void reject_unknown(const json& obj, std::initializer_list<const char*> keys,
                           const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : keys) known = known || it.key() == k;
    if (!known) throw ConfigError("unknown key '" + it.key() + "' in " + where);
  }
}

inline void read(const json& obj, const char* key, double& out,
                 const std::string& where) {
  if (!obj.contains(key)) return;
  const auto& v = obj.at(key);
  if (!v.is_number())
    throw ConfigError(where + "." + key + " must be a number");
  out = v.get<double>();
}

inline void read(const json& obj, const char* key, std::int64_t& out,
                 const std::string& where) {
  if (!obj.contains(key)) return;
  const auto& v = obj.at(key);
  if (!v.is_number_integer())
    throw ConfigError(where + "." + key + " must be an integer");
  out = v.get<std::int64_t>();
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline json parse(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(origin + ": " + e.what());
  }
}

}  // namespace config_detail

inline Scenario scenario_from_json(const nlohmann::json& j) {
  using namespace config_detail;
  reject_unknown(j, {"name", "params", "drives", "spring", "integration", "window"},
                 "scenario");
  Scenario s;
  if (j.contains("name")) {
    if (!j["name"].is_string()) throw ConfigError("scenario.name must be a string");
    s.name = j["name"].get<std::string>();
  }

  if (j.contains("params")) {
    const auto& o = j["params"];
    reject_unknown(o, {"omega_0", "omega_1", "kappa", "gamma_0", "gamma_1", "g_0",
                       "g_1", "delta_0", "n_th_0", "n_th_1"},
                   "params");
    auto& p = s.system.params;
    read(o, "omega_0", p.omega_0, "params");
    read(o, "omega_1", p.omega_1, "params");
    read(o, "kappa", p.kappa, "params");
    read(o, "gamma_0", p.gamma_0, "params");
    read(o, "gamma_1", p.gamma_1, "params");
    read(o, "g_0", p.g_0, "params");
    read(o, "g_1", p.g_1, "params");
    read(o, "delta_0", p.delta_0, "params");
    read(o, "n_th_0", p.n_th_0, "params");
    read(o, "n_th_1", p.n_th_1, "params");
  }

  if (j.contains("drives")) {
    const auto& o = j["drives"];
    reject_unknown(o, {"a_l_0", "a_l_p1", "a_l_m1", "omega_l_mod", "a_v_0", "a_v_p1",
                       "a_v_m1", "omega_v_mod"},
                   "drives");
    auto& d = s.system.drives;
    read(o, "a_l_0", d.a_l_0, "drives");
    read(o, "a_l_p1", d.a_l_p1, "drives");
    read(o, "a_l_m1", d.a_l_m1, "drives");
    read(o, "omega_l_mod", d.omega_l_mod, "drives");
    read(o, "a_v_0", d.a_v_0, "drives");
    read(o, "a_v_p1", d.a_v_p1, "drives");
    read(o, "a_v_m1", d.a_v_m1, "drives");
    read(o, "omega_v_mod", d.omega_v_mod, "drives");
  }

  if (j.contains("spring")) {
    const auto& o = j["spring"];
    reject_unknown(o, {"theta_0", "theta_1", "spring_mod_scope"}, "spring");
    auto& sp = s.system.spring;
    read(o, "theta_0", sp.theta_0, "spring");
    read(o, "theta_1", sp.theta_1, "spring");
    if (o.contains("spring_mod_scope")) {
      const auto scope = o["spring_mod_scope"].get<std::string>();
      if (scope == "both") sp.scope = SpringScope::both;
      else if (scope == "fluctuations_only") sp.scope = SpringScope::fluctuations_only;
      else throw ConfigError("spring.spring_mod_scope must be 'both' or 'fluctuations_only'");
    }
  }

  auto& cfg = s.integration;
  if (j.contains("integration")) {
    const auto& o = j["integration"];
    reject_unknown(o, {"dt", "steps_per_period", "t_end", "periods", "record_stride",
                       "divergence_threshold", "initial_condition"},
                   "integration");
    if (o.contains("dt") && o.contains("steps_per_period"))
      throw ConfigError("integration: give either dt or steps_per_period, not both");
    if (o.contains("t_end") && o.contains("periods"))
      throw ConfigError("integration: give either t_end or periods, not both");
    read(o, "dt", cfg.dt, "integration");
    read(o, "t_end", cfg.t_end, "integration");
    if (o.contains("steps_per_period")) {
      double spp = 0.0;
      read(o, "steps_per_period", spp, "integration");
      if (!(spp > 0.0)) throw ConfigError("integration.steps_per_period must be > 0");
      cfg.dt = kTwoPi / spp;
    }
    if (o.contains("periods")) {
      double periods = 0.0;
      read(o, "periods", periods, "integration");
      cfg.t_end = periods * kTwoPi;
    }
    read(o, "record_stride", cfg.record_stride, "integration");
    read(o, "divergence_threshold", cfg.divergence_threshold, "integration");
    if (o.contains("initial_condition")) {
      const auto ic = o["initial_condition"].get<std::string>();
      if (ic == "carrier_steady") s.initial = InitialCondition::carrier_steady;
      else if (ic == "vacuum") s.initial = InitialCondition::vacuum;
      else throw ConfigError("integration.initial_condition must be 'carrier_steady' or 'vacuum'");
    }
  }

  s.window = last_periods_window(cfg, kDefaultWindowPeriods);
  if (j.contains("window")) {
    const auto& o = j["window"];
    reject_unknown(o, {"begin", "end", "last_periods"}, "window");
    if (o.contains("last_periods")) {
      if (o.contains("begin") || o.contains("end"))
        throw ConfigError("window: give either last_periods or begin/end");
      double n = 0.0;
      read(o, "last_periods", n, "window");
      s.window = last_periods_window(cfg, n);
    } else {
      read(o, "begin", s.window.begin, "window");
      read(o, "end", s.window.end, "window");
    }
  }
  return s;
}

inline nlohmann::json to_json(const Scenario& s) {
  const auto& p = s.system.params;
  const auto& d = s.system.drives;
  const auto& sp = s.system.spring;
  const auto& c = s.integration;
  nlohmann::json j;
  j["name"] = s.name;
  j["params"] = {{"omega_0", p.omega_0}, {"omega_1", p.omega_1}, {"kappa", p.kappa},
                 {"gamma_0", p.gamma_0}, {"gamma_1", p.gamma_1}, {"g_0", p.g_0},
                 {"g_1", p.g_1},         {"delta_0", p.delta_0}, {"n_th_0", p.n_th_0},
                 {"n_th_1", p.n_th_1}};
  j["drives"] = {{"a_l_0", d.a_l_0},   {"a_l_p1", d.a_l_p1},
                 {"a_l_m1", d.a_l_m1}, {"omega_l_mod", d.omega_l_mod},
                 {"a_v_0", d.a_v_0},   {"a_v_p1", d.a_v_p1},
                 {"a_v_m1", d.a_v_m1}, {"omega_v_mod", d.omega_v_mod}};
  j["spring"] = {{"theta_0", sp.theta_0},
                 {"theta_1", sp.theta_1},
                 {"spring_mod_scope",
                  sp.scope == SpringScope::both ? "both" : "fluctuations_only"}};
  j["integration"] = {
      {"dt", c.dt},
      {"t_end", c.t_end},
      {"record_stride", c.record_stride},
      {"divergence_threshold", c.divergence_threshold},
      {"initial_condition",
       s.initial == InitialCondition::carrier_steady ? "carrier_steady" : "vacuum"}};
  j["window"] = {{"begin", s.window.begin}, {"end", s.window.end}};
  return j;
}

inline Scenario load_scenario(const std::filesystem::path& path) {
  using namespace config_detail;
  auto s = scenario_from_json(parse(read_text(path), path.string()));
  if (s.name.empty()) s.name = path.stem().string();
  return s;
}

inline SweepSpec sweep_from_json(const nlohmann::json& j,
                                 const std::filesystem::path& base_dir = {}) {
  using namespace config_detail;
  reject_unknown(j, {"name", "base", "base_file", "axes", "full_resolution",
                     "ratio_convention"},
                 "sweep");
  SweepSpec spec;
  if (j.contains("name")) spec.name = j["name"].get<std::string>();

  if (j.contains("base") && j.contains("base_file"))
    throw ConfigError("sweep: give either base or base_file, not both");
  if (j.contains("base")) spec.base = scenario_from_json(j["base"]);
  else if (j.contains("base_file"))
    spec.base = load_scenario(base_dir / j["base_file"].get<std::string>());

  bool full = false;
  if (j.contains("full_resolution")) {
    if (!j["full_resolution"].is_boolean())
      throw ConfigError("sweep.full_resolution must be a boolean");
    full = j["full_resolution"].get<bool>();
  }
  if (j.contains("ratio_convention")) {
    const auto rc = j["ratio_convention"].get<std::string>();
    if (rc == "fixed_minus") spec.ratio_convention = RatioConvention::fixed_minus;
    else if (rc == "constant_sum") spec.ratio_convention = RatioConvention::constant_sum;
    else throw ConfigError("sweep.ratio_convention must be 'fixed_minus' or 'constant_sum'");
  }

  if (!j.contains("axes") || !j["axes"].is_array() || j["axes"].empty() ||
      j["axes"].size() > 2)
    throw ConfigError("sweep.axes must be an array of one or two axes");
  for (const auto& a : j["axes"]) {
    reject_unknown(a, {"parameter", "values", "start", "stop", "count", "full_count"},
                   "axis");
    SweepAxis axis;
    if (!a.contains("parameter")) throw ConfigError("axis.parameter is required");
    axis.parameter = a["parameter"].get<std::string>();
    if (a.contains("values")) {
      if (a.contains("start") || a.contains("stop") || a.contains("count"))
        throw ConfigError("axis: give either values or start/stop/count");
      for (const auto& v : a["values"]) {
        if (!v.is_number()) throw ConfigError("axis.values must be numbers");
        axis.values.push_back(v.get<double>());
      }
    } else {
      double start = 0.0, stop = 0.0;
      std::int64_t count = 0, full_count = 0;
      if (!a.contains("start") || !a.contains("stop") || !a.contains("count"))
        throw ConfigError("axis needs values or start/stop/count");
      read(a, "start", start, "axis");
      read(a, "stop", stop, "axis");
      read(a, "count", count, "axis");
      read(a, "full_count", full_count, "axis");
      axis.values = linspace(start, stop, full && full_count > 0 ? full_count : count);
    }
    spec.axes.push_back(std::move(axis));
  }
  return spec;
}

inline SweepSpec load_sweep(const std::filesystem::path& path) {
  using namespace config_detail;
  auto spec = sweep_from_json(parse(read_text(path), path.string()),
                              path.parent_path());
  if (spec.name.empty()) spec.name = path.stem().string();
  return spec;
}

inline nlohmann::json to_json(const SweepSpec& spec) {
  nlohmann::json j;
  j["name"] = spec.name;
  j["base"] = to_json(spec.base);
  j["ratio_convention"] = spec.ratio_convention == RatioConvention::fixed_minus
                              ? "fixed_minus"
                              : "constant_sum";
  j["axes"] = nlohmann::json::array();
  for (const auto& a : spec.axes)
    j["axes"].push_back({{"parameter", a.parameter}, {"values", a.values}});
  return j;
}

}  // namespace oem
