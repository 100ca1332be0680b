#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "waitr/error.hpp"
#include "waitr/kgraph.hpp"
#include "waitr/sim.hpp"
#include "waitr/synth.hpp"

namespace waitr {

struct RunConfig {
  MissionConfig mission;
  GridSpec grid{20, 20, 0.2, 25.0, -90.0, 7, 1.0};
  SynthParams synth;
  std::vector<std::uint64_t> seeds = default_seeds();

  static std::vector<std::uint64_t> default_seeds() {
    std::vector<std::uint64_t> s;
    for (std::uint64_t i = 1; i <= 20; ++i) s.push_back(i);
    return s;
  }

  void validate() const {
    MissionConfig m = mission;
    m.sync().validate();
    grid.validate();
    if (seeds.empty()) throw Error(ErrorCode::config, "seeds must not be empty");
    if (synth.blobs < 0 || synth.swirls < 0 || synth.patches < 0)
      throw Error(ErrorCode::config, "synth feature counts must be >= 0");
  }
};

namespace detail {

using nlohmann::json;

// A finite number, or one of the strings "inf"/"infinity" when allowed.
inline double json_number(const json& v, const std::string& key, bool allow_inf = false) {
  if (v.is_number()) return v.get<double>();
  if (allow_inf && v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s == "inf" || s == "infinity") return kInfinity;
  }
  throw Error(ErrorCode::config, "key '" + key + "' expects a number" + (allow_inf ? " or \"inf\"" : ""));
}

inline long long json_integer(const json& v, const std::string& key) {
  if (v.is_number_integer() || v.is_number_unsigned()) return v.get<long long>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::floor(d) == d) return static_cast<long long>(d);
  }
  throw Error(ErrorCode::config, "key '" + key + "' expects an integer");
}

struct ConfigField {
  std::string key;
  std::function<void(RunConfig&, const json&)> set;
  std::function<json(const RunConfig&)> get;
};

#define WAITR_REAL(KEY, MEMBER)                                                         \
  ConfigField{KEY, [](RunConfig& c, const json& v) { c.MEMBER = json_number(v, KEY); }, \
              [](const RunConfig& c) { return json(c.MEMBER); }}
#define WAITR_INT(KEY, MEMBER)                                                                            \
  ConfigField{KEY, [](RunConfig& c, const json& v) { c.MEMBER = static_cast<int>(json_integer(v, KEY)); }, \
              [](const RunConfig& c) { return json(c.MEMBER); }}

inline const std::vector<ConfigField>& config_fields() {
  static const std::vector<ConfigField> fields = {
      WAITR_REAL("mission.tau_poi", mission.tau_poi),
      WAITR_REAL("mission.tau_haz", mission.tau_haz),
      WAITR_REAL("mission.radius", mission.radius),
      WAITR_INT("mission.agents", mission.agents),
      WAITR_INT("mission.waypoints", mission.waypoints),
      WAITR_INT("mission.pathlet_block", mission.pathlet_block),
      WAITR_REAL("wpr.alpha", mission.wpr.alpha),
      WAITR_REAL("wpr.beta", mission.wpr.beta),
      WAITR_REAL("wpr.lambda", mission.wpr.lambda),
      WAITR_REAL("ted.delta", mission.ted.delta),
      ConfigField{"ted.predictor",
                  [](RunConfig& c, const json& v) {
                    if (!v.is_string()) throw Error(ErrorCode::config, "key 'ted.predictor' expects a string");
                    c.mission.ted.predictor = predictor_from_string(v.get<std::string>());
                  },
                  [](const RunConfig& c) { return json(to_string(c.mission.ted.predictor)); }},
      WAITR_INT("ted.horizon", mission.ted.horizon),
      WAITR_REAL("ted.confidence_decay", mission.ted.confidence_decay),
      WAITR_REAL("ted.frame_interval", mission.ted.frame_interval),
      WAITR_INT("planner.T", mission.planner.T),
      WAITR_REAL("planner.gamma", mission.planner.gamma),
      WAITR_REAL("planner.lambda", mission.planner.lambda),
      WAITR_INT("planner.speed", mission.planner.speed),
      WAITR_INT("planner.beam", mission.planner.beam),
      WAITR_REAL("graph.connect_radius", mission.graph.connect_radius),
      WAITR_INT("graph.bridge_spacing", mission.graph.bridge_spacing),
      WAITR_REAL("graph.lambda_edge", mission.graph.lambda_edge),
      ConfigField{"graph.h_coef",
                  [](RunConfig& c, const json& v) { c.mission.graph.h_coef = json_number(v, "graph.h_coef", true); },
                  [](const RunConfig& c) {
                    return std::isinf(c.mission.graph.h_coef) ? json("inf") : json(c.mission.graph.h_coef);
                  }},
      WAITR_REAL("graph.hazard_radius", mission.graph.hazard_radius),
      WAITR_INT("grid.width", grid.width),
      WAITR_INT("grid.height", grid.height),
      WAITR_INT("grid.frames", grid.frames),
      WAITR_REAL("grid.cell_size", grid.cell_size),
      WAITR_REAL("grid.origin_lat", grid.origin_lat),
      WAITR_REAL("grid.origin_lon", grid.origin_lon),
      WAITR_REAL("synth.background", synth.background),
      WAITR_INT("synth.blobs", synth.blobs),
      WAITR_REAL("synth.blob_amp_min", synth.blob_amp_min),
      WAITR_REAL("synth.blob_amp_max", synth.blob_amp_max),
      WAITR_REAL("synth.blob_sigma_min", synth.blob_sigma_min),
      WAITR_REAL("synth.blob_sigma_max", synth.blob_sigma_max),
      WAITR_REAL("synth.blob_drift_max", synth.blob_drift_max),
      WAITR_REAL("synth.blob_halfwidth_min", synth.blob_halfwidth_min),
      WAITR_REAL("synth.blob_halfwidth_max", synth.blob_halfwidth_max),
      WAITR_INT("synth.swirls", synth.swirls),
      WAITR_REAL("synth.swirl_speed_min", synth.swirl_speed_min),
      WAITR_REAL("synth.swirl_speed_max", synth.swirl_speed_max),
      WAITR_REAL("synth.swirl_sigma_min", synth.swirl_sigma_min),
      WAITR_REAL("synth.swirl_sigma_max", synth.swirl_sigma_max),
      WAITR_REAL("synth.swirl_drift_max", synth.swirl_drift_max),
      WAITR_INT("synth.patches", synth.patches),
      WAITR_REAL("synth.patch_speed_min", synth.patch_speed_min),
      WAITR_REAL("synth.patch_speed_max", synth.patch_speed_max),
      WAITR_REAL("synth.patch_sigma_min", synth.patch_sigma_min),
      WAITR_REAL("synth.patch_sigma_max", synth.patch_sigma_max),
      WAITR_REAL("synth.patch_drift_max", synth.patch_drift_max),
      ConfigField{"seeds",
                  [](RunConfig& c, const json& v) {
                    if (!v.is_array()) throw Error(ErrorCode::config, "key 'seeds' expects a list of integers");
                    c.seeds.clear();
                    for (const json& s : v) {
                      const long long n = json_integer(s, "seeds");
                      if (n < 0) throw Error(ErrorCode::config, "seeds must be nonnegative");
                      c.seeds.push_back(static_cast<std::uint64_t>(n));
                    }
                  },
                  [](const RunConfig& c) { return json(c.seeds); }},
  };
  return fields;
}

#undef WAITR_REAL
#undef WAITR_INT

inline const ConfigField& config_field(const std::string& key) {
  for (const ConfigField& f : config_fields())
    if (f.key == key) return f;
  throw Error(ErrorCode::config, "unknown config key '" + key + "'");
}

inline void flatten(const json& j, const std::string& prefix, std::vector<std::pair<std::string, json>>& out) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (it->is_object()) flatten(*it, key, out);
    else out.emplace_back(key, *it);
  }
}

}  // namespace detail

// Applies a JSON document on top of `base`; every leaf must be a known key.
inline RunConfig apply_config_json(const std::string& text, RunConfig base = {}) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::config, std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::config, "config root must be an object");
  std::vector<std::pair<std::string, nlohmann::json>> leaves;
  detail::flatten(j, "", leaves);
  for (const auto& [key, value] : leaves) detail::config_field(key).set(base, value);
  return base;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  RunConfig cfg = apply_config_json(ss.str());
  cfg.validate();
  return cfg;
}

// `key=value` override; the value is read as JSON when it parses, else as a
// bare string (so `ted.predictor=linear_trend` and `graph.h_coef=inf` work).
inline void apply_override(RunConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw Error(ErrorCode::config, "override must look like key=value: " + assignment);
  const std::string key = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  nlohmann::json value = nlohmann::json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;
  detail::config_field(key).set(cfg, value);
}

inline nlohmann::json config_to_json(const RunConfig& cfg) {
  nlohmann::json j = nlohmann::json::object();
  for (const detail::ConfigField& f : detail::config_fields()) {
    const auto dot = f.key.find('.');
    if (dot == std::string::npos) j[f.key] = f.get(cfg);
    else j[f.key.substr(0, dot)][f.key.substr(dot + 1)] = f.get(cfg);
  }
  return j;
}

}  // namespace waitr
