#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "waitr/clustering.hpp"
#include "waitr/env.hpp"
#include "waitr/error.hpp"
#include "waitr/kgraph.hpp"
#include "waitr/pathlets.hpp"
#include "waitr/planner.hpp"
#include "waitr/synth.hpp"
#include "waitr/ted.hpp"

namespace waitr {

enum class PlannerKind { waitr, greedy };

inline const char* to_string(PlannerKind k) { return k == PlannerKind::waitr ? "waitr" : "greedy"; }

inline PlannerKind planner_from_string(const std::string& s) {
  if (s == "waitr") return PlannerKind::waitr;
  if (s == "greedy") return PlannerKind::greedy;
  throw Error(ErrorCode::config, "unknown planner '" + s + "' (expected waitr or greedy)");
}

struct MissionConfig {
  double tau_poi = 1.0;  // degrees C
  double tau_haz = 0.5;  // m/s
  double radius = 0.5;   // observational radius, degrees
  int agents = 3;
  int waypoints = 20;
  int pathlet_block = 0;  // cells; 0 derives it from speed and horizon
  WPRConfig wpr;
  TEDConfig ted;
  PlannerConfig planner;
  GraphKnobs graph;

  // Propagates the shared observational radius into every module.
  MissionConfig& sync() {
    wpr.radius = radius;
    planner.radius = radius;
    graph.obs_radius = radius;
    ted.horizon = std::max(ted.horizon, planner.T);
    return *this;
  }

  void validate() const {
    if (!(tau_poi > 0.0)) throw Error(ErrorCode::config, "tau_poi must be > 0");
    if (!(tau_haz > 0.0)) throw Error(ErrorCode::config, "tau_haz must be > 0");
    if (!(radius > 0.0)) throw Error(ErrorCode::config, "radius must be > 0");
    if (agents < 1) throw Error(ErrorCode::config, "agents must be >= 1");
    if (waypoints < 1) throw Error(ErrorCode::config, "waypoints must be >= 1");
    if (pathlet_block < 0) throw Error(ErrorCode::config, "pathlet_block must be >= 0");
    wpr.validate();
    ted.validate();
    planner.validate();
    graph.validate();
  }

  int effective_block() const {
    return pathlet_block > 0 ? pathlet_block
                             : speed_adjusted_block(planner.speed, planner.T, graph.bridge_spacing);
  }
};

// Everything both planners share for one environment: the extracted events
// and hazards, the initial graph and pathlets, and agent start nodes.
struct Scenario {
  GridSpec spec;
  std::vector<Event> events;
  std::vector<Hazard> hazards;
  std::vector<Cluster> clusters;  // aggregated WPR ranking
  KGraph graph;
  Pathlets pathlets;
  std::vector<int> start_nodes;
  std::vector<EventDensitySeries> density;  // waypoint nodes only
};

// Frame f is scored against differential layer max(f, 1): frame 0 has no
// differential of its own.
inline int reward_layer(int frame) { return std::max(frame, 1); }

inline Scenario prepare_scenario(const EnvSeries& env, MissionConfig cfg) {
  cfg.sync().validate();
  env.validate();
  Scenario s;
  s.spec = env.spec;
  s.events = extract_events(env, cfg.tau_poi);
  s.hazards = extract_hazards(env, cfg.tau_haz);
  s.clusters = wpr_cluster(s.events, s.hazards, s.spec, cfg.wpr);

  std::vector<Cluster> waypoints = prep_select(s.clusters, cfg.waypoints, cfg.wpr.lambda, s.spec.cell_size);
  std::sort(waypoints.begin(), waypoints.end(), [&](const Cluster& a, const Cluster& b) {
    auto rank = [&](const Cluster& c) {
      for (std::size_t i = 0; i < s.clusters.size(); ++i)
        if (s.clusters[i].centroid == c.centroid) return i;
      return s.clusters.size();
    };
    return rank(a) < rank(b);
  });

  std::vector<Cell> starts;
  for (const Cluster& c : wpr_cluster(s.events, s.hazards, s.spec, cfg.wpr, 1)) {
    if (static_cast<int>(starts.size()) == cfg.agents) break;
    starts.push_back(c.centroid);
  }
  for (const Cluster& c : s.clusters) {
    if (static_cast<int>(starts.size()) == cfg.agents) break;
    if (std::find(starts.begin(), starts.end(), c.centroid) == starts.end()) starts.push_back(c.centroid);
  }
  if (starts.empty()) starts.push_back({s.spec.height / 2, s.spec.width / 2});
  for (Cell c : starts) {
    const bool present = std::any_of(waypoints.begin(), waypoints.end(),
                                     [&](const Cluster& w) { return w.centroid == c; });
    if (!present) {
      Cluster extra;
      extra.centroid = c;
      waypoints.push_back(extra);
    }
  }

  s.graph = build_graph(waypoints, s.hazards, s.spec, cfg.graph, cfg.wpr);
  s.pathlets = partition(s.graph, cfg.effective_block());
  for (std::size_t i = 0; i < static_cast<std::size_t>(cfg.agents); ++i) {
    const Cell c = starts[i % starts.size()];
    for (const KNode& n : s.graph.nodes())
      if (n.kind == NodeKind::waypoint && n.cell == c) s.start_nodes.push_back(n.id);
  }
  std::vector<std::pair<int, Cell>> wp_cells;
  for (int id : s.graph.waypoint_ids()) wp_cells.emplace_back(id, s.graph.node(id).cell);
  s.density = density_series(wp_cells, s.events, s.spec, cfg.radius);
  return s;
}

struct FrameMetrics {
  int frame = 0;
  int newly_covered = 0;
  int cumulative_covered = 0;
  int hazard_exposure_steps = 0;

  friend bool operator==(const FrameMetrics&, const FrameMetrics&) = default;
};

struct PlanStep {
  int agent = 0;
  int frame = 0;
  int node = 0;
  Cell cell;
  double claimed_reward = 0.0;

  friend bool operator==(const PlanStep&, const PlanStep&) = default;
};

struct Activation {
  int frame = 0;
  int node = 0;
  double rate = 0.0;
  bool activated = false;

  friend bool operator==(const Activation&, const Activation&) = default;
};

struct MetricsReport {
  std::string planner;
  std::uint64_t seed = 0;
  std::vector<FrameMetrics> per_frame;
  int covered = 0;
  int total_events = 0;
  double ecr = 0.0;
  bool zero_total = false;
  std::vector<std::vector<int>> positions;  // [frame][agent], end-of-frame node
  std::vector<PlanStep> steps;
  std::vector<Activation> activations;

  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

inline double ecr(int covered, int total) {
  if (covered < 0 || total < 0) throw Error(ErrorCode::invalid_argument, "counts must be nonnegative");
  if (covered > total) throw Error(ErrorCode::invalid_argument, "covered exceeds total events");
  if (total == 0) return 0.0;
  return static_cast<double>(covered) / static_cast<double>(total);
}

inline bool near_hazard(Cell c, const std::vector<Hazard>& frame_hazards, double radius, double cell_size) {
  return std::any_of(frame_hazards.begin(), frame_hazards.end(),
                     [&](const Hazard& h) { return within_radius(c, h.cell, radius, cell_size); });
}

// Final graph state of a mission, with every frame's attributes filled in.
struct MissionTrace {
  KGraph graph;
  Pathlets pathlets;
};

// Runs one mission on a private copy of the scenario graph. Per frame:
// update graph, plan, move one step, then cover events near end positions.
inline MetricsReport run_mission(const Scenario& scn, PlannerKind kind, MissionConfig cfg,
                                 std::uint64_t seed = 0, MissionTrace* trace = nullptr) {
  cfg.sync().validate();
  KGraph g = scn.graph;
  Pathlets ps = scn.pathlets;
  const GridSpec& spec = scn.spec;
  const double hazard_radius = cfg.graph.effective_hazard_radius(spec.cell_size);

  MetricsReport rep;
  rep.planner = to_string(kind);
  rep.seed = seed;
  rep.total_events = static_cast<int>(scn.events.size());
  rep.zero_total = rep.total_events == 0;

  std::vector<AgentState> agents;
  for (std::size_t i = 0; i < scn.start_nodes.size(); ++i) {
    AgentState a;
    a.id = static_cast<int>(i);
    a.node = scn.start_nodes[i];
    a.pathlet = ps.owner[a.node];
    agents.push_back(a);
  }

  std::vector<bool> covered(scn.events.size(), false);
  for (int f = 0; f < spec.frames; ++f) {
    const int layer = reward_layer(f);
    const int t_idx = layer - 1;
    std::vector<std::size_t> layer_idx;
    std::vector<Event> layer_events;
    for (std::size_t i = 0; i < scn.events.size(); ++i)
      if (scn.events[i].frame == layer && !covered[i]) {
        layer_idx.push_back(i);
        layer_events.push_back(scn.events[i]);
      }
    const std::vector<Hazard> frame_hazards = at_frame(scn.hazards, f);

    std::vector<double> rates(static_cast<std::size_t>(g.size()), 0.0);
    std::vector<int> active;
    if (t_idx >= 1) {
      for (const auto& s : scn.density) rates[s.node] = density_rate(s, t_idx, cfg.ted.frame_interval);
      active = activate(scn.density, t_idx, cfg.ted);
    }
    for (const auto& s : scn.density)
      rep.activations.push_back({f, s.node, rates[s.node],
                                 std::binary_search(active.begin(), active.end(), s.node)});

    update_frame(g, f, layer_events, frame_hazards, active);
    refresh_tables(ps, g, f);

    std::vector<Plan> plans;
    if (kind == PlannerKind::waitr) {
      const RewardForecast fc = build_reward_forecast(g, f, layer_events, rates, cfg.ted, cfg.planner.T);
      plans = plan_waitr(g, ps, agents, fc, cfg.planner, f);
    } else {
      plans = plan_greedy(g, ps, agents, cfg.planner, f);
    }

    std::vector<int> positions;
    for (std::size_t i = 0; i < agents.size(); ++i) {
      const Plan& p = plans[i];
      const int next = p.waypoints.size() > 1 ? p.waypoints[1] : p.waypoints[0];
      agents[i].visited.push_back(agents[i].node);
      agents[i].node = next;
      agents[i].pathlet = ps.owner[next];
      positions.push_back(next);
      rep.steps.push_back({agents[i].id, f, next, g.node(next).cell,
                           p.claimed_reward.size() > 1 ? p.claimed_reward[1] : 0.0});
    }
    rep.positions.push_back(positions);

    FrameMetrics fm;
    fm.frame = f;
    for (std::size_t i : layer_idx)
      for (int node : positions)
        if (within_radius(g.node(node).cell, scn.events[i].cell, cfg.radius, spec.cell_size)) {
          covered[i] = true;
          ++fm.newly_covered;
          break;
        }
    for (int node : positions)
      if (near_hazard(g.node(node).cell, frame_hazards, hazard_radius, spec.cell_size))
        ++fm.hazard_exposure_steps;
    rep.covered += fm.newly_covered;
    fm.cumulative_covered = rep.covered;
    rep.per_frame.push_back(fm);
  }
  rep.ecr = ecr(rep.covered, rep.total_events);
  if (trace) *trace = {std::move(g), std::move(ps)};
  return rep;
}

inline MetricsReport run_mission(const EnvSeries& env, PlannerKind kind, const MissionConfig& cfg,
                                 std::uint64_t seed = 0) {
  return run_mission(prepare_scenario(env, cfg), kind, cfg, seed);
}

struct SeedComparison {
  std::uint64_t seed = 0;
  MetricsReport waitr;
  MetricsReport greedy;

  std::string winner() const {
    if (waitr.covered > greedy.covered) return "waitr";
    if (waitr.covered < greedy.covered) return "greedy";
    return "tie";
  }
};

struct ComparisonTable {
  std::vector<SeedComparison> rows;
  int waitr_wins = 0;
  int greedy_wins = 0;
  int ties = 0;
  int waitr_total = 0;
  int greedy_total = 0;
  int total_events = 0;

  void add(SeedComparison row) {
    const std::string w = row.winner();
    if (w == "waitr") ++waitr_wins;
    else if (w == "greedy") ++greedy_wins;
    else ++ties;
    waitr_total += row.waitr.covered;
    greedy_total += row.greedy.covered;
    total_events += row.waitr.total_events;
    rows.push_back(std::move(row));
  }

  // Seeds where WAITR covered at least as much as greedy.
  int waitr_at_least_greedy() const { return waitr_wins + ties; }
};

// Both planners run against the same Scenario object.
inline SeedComparison compare_one(const EnvSeries& env, const MissionConfig& cfg, std::uint64_t seed) {
  const Scenario scn = prepare_scenario(env, cfg);
  SeedComparison row;
  row.seed = seed;
  row.waitr = run_mission(scn, PlannerKind::waitr, cfg, seed);
  row.greedy = run_mission(scn, PlannerKind::greedy, cfg, seed);
  return row;
}

inline ComparisonTable compare(const EnvSeries& env, const MissionConfig& cfg,
                               const std::vector<std::uint64_t>& seeds) {
  if (seeds.empty()) throw Error(ErrorCode::invalid_argument, "compare needs at least one seed");
  ComparisonTable table;
  for (std::uint64_t s : seeds) table.add(compare_one(env, cfg, s));
  return table;
}

// One synthetic environment per seed.
inline ComparisonTable compare_suite(const GridSpec& spec, const SynthParams& params,
                                     const MissionConfig& cfg, const std::vector<std::uint64_t>& seeds) {
  if (seeds.empty()) throw Error(ErrorCode::invalid_argument, "compare needs at least one seed");
  ComparisonTable table;
  for (std::uint64_t s : seeds) table.add(compare_one(synth_scenario(s, spec, params), cfg, s));
  return table;
}

}  // namespace waitr
