#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "waitr/env.hpp"
#include "waitr/error.hpp"
#include "waitr/geometry.hpp"

namespace waitr {

// rho[i] is the event density of differential frame i + 1.
struct EventDensitySeries {
  int node = 0;
  std::vector<double> rho;
};

enum class PredictorKind { persistence, linear_trend };

inline const char* to_string(PredictorKind k) {
  return k == PredictorKind::persistence ? "persistence" : "linear_trend";
}

inline PredictorKind predictor_from_string(const std::string& s) {
  if (s == "persistence") return PredictorKind::persistence;
  if (s == "linear_trend") return PredictorKind::linear_trend;
  throw Error(ErrorCode::config, "unknown predictor '" + s + "'");
}

struct TEDConfig {
  double delta = 1.0;
  PredictorKind predictor = PredictorKind::persistence;
  int horizon = 6;
  double confidence_decay = 0.9;
  double frame_interval = 1.0;

  void validate() const {
    if (!(delta >= 0.0)) throw Error(ErrorCode::config, "ted.delta must be >= 0");
    if (horizon < 1) throw Error(ErrorCode::config, "ted.horizon must be >= 1");
    if (!(confidence_decay > 0.0 && confidence_decay <= 1.0))
      throw Error(ErrorCode::config, "ted.confidence_decay must lie in (0, 1]");
    if (!(frame_interval > 0.0)) throw Error(ErrorCode::config, "ted.frame_interval must be > 0");
  }
};

// Event counts within `radius` of each node, one entry per differential frame.
inline std::vector<EventDensitySeries> density_series(
    const std::vector<std::pair<int, Cell>>& nodes, const std::vector<Event>& events,
    const GridSpec& spec, double radius) {
  std::vector<EventDensitySeries> out;
  for (const auto& [id, cell] : nodes) {
    EventDensitySeries s;
    s.node = id;
    s.rho.assign(static_cast<std::size_t>(spec.frames - 1), 0.0);
    for (const Event& e : events)
      if (e.frame >= 1 && e.frame < spec.frames &&
          within_radius(cell, e.cell, radius, spec.cell_size))
        s.rho[static_cast<std::size_t>(e.frame - 1)] += e.count;
    out.push_back(std::move(s));
  }
  return out;
}

inline double density_rate(const EventDensitySeries& series, int t, double frame_interval = 1.0) {
  if (t < 1 || t >= static_cast<int>(series.rho.size()))
    throw Error(ErrorCode::out_of_range,
                "density_rate: t=" + std::to_string(t) + " outside [1, " +
                    std::to_string(series.rho.size()) + ")");
  return (series.rho[t] - series.rho[t - 1]) / frame_interval;
}

// Nodes whose density rises faster than delta (strict).
inline std::vector<int> activate(const std::vector<EventDensitySeries>& all, int t,
                                 const TEDConfig& cfg) {
  std::vector<int> out;
  for (const auto& s : all)
    if (density_rate(s, t, cfg.frame_interval) > cfg.delta) out.push_back(s.node);
  std::sort(out.begin(), out.end());
  return out;
}

// k-step-ahead value for a node currently worth `current`.
inline double forecast_value(double current, double rate, int k, PredictorKind kind) {
  if (kind == PredictorKind::persistence) return current;
  return std::max(0.0, current + k * rate);
}

struct NodeForecast {
  int node = 0;
  std::vector<double> value;       // index k - 1 holds frame t + k
  std::vector<double> confidence;  // confidence_decay^k
};

inline std::vector<double> forecast_confidence(const TEDConfig& cfg) {
  std::vector<double> c;
  double acc = 1.0;
  for (int k = 1; k <= cfg.horizon; ++k) {
    acc *= cfg.confidence_decay;
    c.push_back(acc);
  }
  return c;
}

inline std::vector<NodeForecast> forecast_weights(const std::vector<EventDensitySeries>& all,
                                                  int t, const TEDConfig& cfg) {
  cfg.validate();
  if (t < 1) throw Error(ErrorCode::out_of_range, "forecast_weights needs t >= 1");
  const auto conf = forecast_confidence(cfg);
  std::vector<NodeForecast> out;
  for (const auto& s : all) {
    if (t >= static_cast<int>(s.rho.size()))
      throw Error(ErrorCode::out_of_range, "forecast_weights: t beyond series");
    NodeForecast f;
    f.node = s.node;
    const double rate = density_rate(s, t, cfg.frame_interval);
    for (int k = 1; k <= cfg.horizon; ++k)
      f.value.push_back(forecast_value(s.rho[t], rate, k, cfg.predictor));
    f.confidence = conf;
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace waitr
