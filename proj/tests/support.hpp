#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "waitr/waitr.hpp"

namespace support {

using namespace waitr;

inline GridSpec suite_spec() { return {20, 20, 0.2, 25.0, -90.0, 7, 1.0}; }

inline std::vector<std::uint64_t> suite_seeds() {
  std::vector<std::uint64_t> s;
  for (std::uint64_t i = 1; i <= 20; ++i) s.push_back(i);
  return s;
}

inline EnvSeries blank_env(GridSpec spec, double temp = 20.0) {
  EnvSeries env;
  env.spec = spec;
  for (int f = 0; f < spec.frames; ++f) {
    env.temperature.emplace_back(spec.height, spec.width, temp);
    env.current_u.emplace_back(spec.height, spec.width, 0.0);
    env.current_v.emplace_back(spec.height, spec.width, 0.0);
  }
  return env;
}

// Random geometric graph with random nonnegative weights.
inline KGraph random_graph(std::mt19937_64& rng, int n, int frames = 2) {
  std::uniform_int_distribution<int> pos(0, 19);
  std::uniform_real_distribution<double> unit(0, 1);
  KGraph g({20, 20, 0.1, 0, 0, frames, 1}, GraphKnobs{});
  std::set<Cell> used;
  while (g.size() < n) {
    const Cell c{pos(rng), pos(rng)};
    if (used.insert(c).second) g.add_node(NodeKind::bridge, c);
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (distance_deg(g.node(i).cell, g.node(j).cell, 0.1) <= 0.45 && unit(rng) < 0.7) g.add_edge(i, j);
  for (std::size_t e = 0; e < g.edges().size(); ++e)
    for (int f = 0; f < frames; ++f) g.set_edge_weight(static_cast<int>(e), f, unit(rng) * 3.0);
  return g;
}

// Independent double-loop references for event and hazard extraction.
inline std::vector<Event> brute_events(const EnvSeries& env, double tau) {
  std::vector<Event> out;
  for (int t = 1; t < env.spec.frames; ++t)
    for (int r = 0; r < env.spec.height; ++r)
      for (int c = 0; c < env.spec.width; ++c) {
        const double d = std::fabs(env.temperature[t](r, c) - env.temperature[t - 1](r, c));
        if (d >= tau) out.push_back({{r, c}, t, d, 1});
      }
  return out;
}

inline std::vector<Hazard> brute_hazards(const EnvSeries& env, double tau) {
  std::vector<Hazard> out;
  for (int t = 0; t < env.spec.frames; ++t)
    for (int r = 0; r < env.spec.height; ++r)
      for (int c = 0; c < env.spec.width; ++c) {
        const double u = env.current_u[t](r, c), v = env.current_v[t](r, c);
        const double s = std::sqrt(u * u + v * v);
        if (s >= tau) out.push_back({{r, c}, t, s});
      }
  return out;
}

// Every grid cell is a candidate centroid.
inline std::vector<Cluster> all_cells_clusters(const std::vector<Event>& events, const std::vector<Hazard>& hazards,
                                               const GridSpec& spec, const WPRConfig& cfg) {
  const auto pois = weighted_pois(events, hazards, spec, cfg);
  std::vector<Cell> cands;
  for (int r = 0; r < spec.height; ++r)
    for (int c = 0; c < spec.width; ++c) cands.push_back({r, c});
  return detail::suppress_greedy(pois, cands, spec, cfg.radius);
}

// Best objective over every k-subset and every visiting order.
inline double prep_bruteforce(const std::vector<Cluster>& clusters, int k, double lambda, double cell_size) {
  const int n = static_cast<int>(clusters.size());
  double best = -std::numeric_limits<double>::infinity();
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (__builtin_popcount(mask) != k) continue;
    std::vector<int> idx;
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) idx.push_back(i);
    do {
      std::vector<Cluster> order;
      for (int i : idx) order.push_back(clusters[i]);
      best = std::max(best, prep_objective(order, lambda, cell_size));
    } while (std::next_permutation(idx.begin(), idx.end()));
  }
  return best;
}

// Bellman-Ford from `src` over the subgraph induced by `allowed`.
inline std::map<int, double> bellman_ford(const KGraph& g, int frame, const std::vector<int>& allowed, int src) {
  const std::set<int> in(allowed.begin(), allowed.end());
  std::map<int, double> d;
  for (int v : allowed) d[v] = kInfinity;
  d[src] = 0.0;
  for (std::size_t round = 0; round < allowed.size(); ++round) {
    bool changed = false;
    for (std::size_t e = 0; e < g.edges().size(); ++e) {
      const KEdge& ed = g.edges()[e];
      if (!in.count(ed.a) || !in.count(ed.b)) continue;
      const double w = g.edge_weight(static_cast<int>(e), frame);
      if (std::isinf(w)) continue;
      if (d[ed.a] + w < d[ed.b]) d[ed.b] = d[ed.a] + w, changed = true;
      if (d[ed.b] + w < d[ed.a]) d[ed.a] = d[ed.b] + w, changed = true;
    }
    if (!changed) break;
  }
  return d;
}

inline std::vector<int> all_ids(const KGraph& g) {
  std::vector<int> v(static_cast<std::size_t>(g.size()));
  for (int i = 0; i < g.size(); ++i) v[static_cast<std::size_t>(i)] = i;
  return v;
}

// A graph with every frame's attributes and weights filled from the
// scenario, and tables ready at every frame.
struct Prepared {
  Scenario scn;
  KGraph g;
  Pathlets ps;
};

inline Prepared prepared(std::uint64_t seed, const MissionConfig& cfg = {}) {
  Prepared p;
  p.scn = prepare_scenario(synth_scenario(seed, suite_spec(), {}), cfg);
  MissionTrace trace;
  run_mission(p.scn, PlannerKind::greedy, cfg, seed, &trace);
  p.g = std::move(trace.graph);
  p.ps = std::move(trace.pathlets);
  return p;
}

// Tiny planning instance on a single pathlet with integer edge weights.
struct TinyInstance {
  KGraph g;
  Pathlets ps;
  RewardLayers layers;
  PlannerConfig cfg;
  int start = 0;
};

inline TinyInstance random_tiny(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> nodes_d(2, 6), horizon_d(1, 3), weight_d(1, 4);
  std::uniform_real_distribution<double> reward_d(-1.0, 5.0), unit(0.0, 1.0);
  TinyInstance inst;
  const int n = nodes_d(rng);
  GridSpec spec{6, 6, 1.0, 0.0, 0.0, 2, 1.0};
  inst.g = KGraph(spec, GraphKnobs{});
  for (int i = 0; i < n; ++i) inst.g.add_node(NodeKind::waypoint, {i, i});
  for (int i = 1; i < n; ++i) inst.g.add_edge(std::uniform_int_distribution<int>(0, i - 1)(rng), i);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (!inst.g.find_edge(i, j) && unit(rng) < 0.3) inst.g.add_edge(i, j);
  for (std::size_t e = 0; e < inst.g.edges().size(); ++e)
    inst.g.set_edge_weight(static_cast<int>(e), 0, weight_d(rng));
  inst.ps = partition(inst.g, 100);
  refresh_tables(inst.ps, inst.g, 0);
  inst.cfg.T = horizon_d(rng);
  inst.cfg.gamma = 0.5 + 0.5 * unit(rng);
  inst.cfg.lambda = unit(rng);
  inst.cfg.speed = 1;
  inst.cfg.beam = 0;
  inst.layers.assign(static_cast<std::size_t>(inst.cfg.T + 1), std::vector<double>(static_cast<std::size_t>(n)));
  for (auto& layer : inst.layers)
    for (double& w : layer) w = reward_d(rng);
  inst.start = std::uniform_int_distribution<int>(0, n - 1)(rng);
  return inst;
}

// Enumerates every sequence of one-hop moves (or stays) and scores each with
// a naive evaluation over Floyd-Warshall travel costs.
inline double exhaustive_best(const TinyInstance& inst) {
  const int n = inst.g.size();
  std::vector<std::vector<double>> dist(n, std::vector<double>(n, kInfinity));
  for (int i = 0; i < n; ++i) dist[i][i] = 0.0;
  for (std::size_t e = 0; e < inst.g.edges().size(); ++e) {
    const KEdge& ed = inst.g.edges()[e];
    dist[ed.a][ed.b] = dist[ed.b][ed.a] = inst.g.edge_weight(static_cast<int>(e), 0);
  }
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) dist[i][j] = std::min(dist[i][j], dist[i][k] + dist[k][j]);

  double best = -kInfinity;
  std::vector<int> seq{inst.start};
  std::function<void()> rec = [&]() {
    if (static_cast<int>(seq.size()) == inst.cfg.T + 1) {
      double s = 0.0;
      for (std::size_t t = 0; t < seq.size(); ++t) {
        const double travel = t == 0 ? 0.0 : dist[seq[t - 1]][seq[t]];
        s += std::pow(inst.cfg.gamma, static_cast<double>(t)) *
             (inst.layers[t][seq[t]] - inst.cfg.lambda * travel);
      }
      best = std::max(best, s);
      return;
    }
    const int u = seq.back();
    for (int v = 0; v < n; ++v)
      if (v == u || inst.g.find_edge(u, v)) {
        seq.push_back(v);
        rec();
        seq.pop_back();
      }
  };
  rec();
  return best;
}

// Re-counts coverage from logged end-of-frame positions.
inline std::vector<int> replay_coverage(const Scenario& scn, const MetricsReport& rep, double radius) {
  std::vector<int> per_frame;
  std::set<std::size_t> seen;
  for (int f = 0; f < scn.spec.frames; ++f) {
    const int layer = std::max(f, 1);
    int n = 0;
    for (std::size_t i = 0; i < scn.events.size(); ++i) {
      if (scn.events[i].frame != layer || seen.count(i)) continue;
      for (int node : rep.positions[f]) {
        const Cell a = scn.graph.node(node).cell, b = scn.events[i].cell;
        const double d = scn.spec.cell_size * std::hypot(a.row - b.row, a.col - b.col);
        if (d <= radius + 1e-9) {
          seen.insert(i);
          ++n;
          break;
        }
      }
    }
    per_frame.push_back(n);
  }
  return per_frame;
}

// Greedy fixture: agent on waypoint `start` plus POI waypoints with the
// given counts, each joined to the start by a direct edge.
struct GreedyFixture {
  KGraph g;
  Pathlets ps;
  std::vector<AgentState> agents;
};

inline GreedyFixture greedy_fixture(Cell start, const std::vector<std::pair<Cell, int>>& pois) {
  GreedyFixture fx;
  GridSpec spec{12, 12, 0.1, 0.0, 0.0, 2, 1.0};
  fx.g = KGraph(spec, GraphKnobs{});
  const int s = fx.g.add_node(NodeKind::waypoint, start);
  for (const auto& [cell, count] : pois) {
    const int id = fx.g.add_node(NodeKind::waypoint, cell);
    fx.g.add_edge(s, id);
    fx.g.attr(id, 0).event_count = count;
  }
  for (std::size_t e = 0; e < fx.g.edges().size(); ++e)
    fx.g.set_edge_weight(static_cast<int>(e), 0, fx.g.edges()[e].base_distance);
  fx.ps = partition(fx.g, 100);
  refresh_tables(fx.ps, fx.g, 0);
  AgentState a;
  a.id = 0;
  a.node = s;
  fx.agents.push_back(a);
  return fx;
}

// Two routes of three hops from S to a rewarding target: a short one that
// skirts a band of hazard cells and a longer detour well clear of them.
struct HazardScenario {
  Scenario scn;
  MissionConfig cfg;
};

inline HazardScenario hazard_two_route(double h_coef) {
  HazardScenario hs;
  GridSpec spec{12, 9, 0.1, 0.0, 0.0, 7, 1.0};
  hs.cfg.agents = 1;
  hs.cfg.radius = 0.15;
  hs.cfg.graph.h_coef = h_coef;
  hs.cfg.pathlet_block = 100;
  hs.cfg.sync();

  Scenario& s = hs.scn;
  s.spec = spec;
  const Cell target{4, 9};
  for (int f = 1; f < spec.frames; ++f) s.events.push_back({target, f, 3.0, 1});
  for (int f = 0; f < spec.frames; ++f) {
    s.hazards.push_back({{4, 4}, f, 1.0});
    s.hazards.push_back({{4, 5}, f, 1.0});
  }
  KGraph g(spec, hs.cfg.graph, hs.cfg.wpr);
  const int S = g.add_node(NodeKind::waypoint, {4, 0});
  const int T = g.add_node(NodeKind::waypoint, target);
  const int b1 = g.add_node(NodeKind::bridge, {4, 3});
  const int b2 = g.add_node(NodeKind::bridge, {4, 6});
  const int u1 = g.add_node(NodeKind::bridge, {1, 3});
  const int u2 = g.add_node(NodeKind::bridge, {1, 6});
  g.add_node(NodeKind::hazard, {4, 4});
  g.add_node(NodeKind::hazard, {4, 5});
  g.add_edge(S, b1);
  g.add_edge(b1, b2);
  g.add_edge(b2, T);
  g.add_edge(S, u1);
  g.add_edge(u1, u2);
  g.add_edge(u2, T);
  s.graph = std::move(g);
  s.pathlets = partition(s.graph, hs.cfg.effective_block());
  s.start_nodes = {S};
  s.density = density_series({{S, s.graph.node(S).cell}, {T, target}}, s.events, spec, hs.cfg.radius);
  return hs;
}

// A cell pair that flips by `step` degrees every frame from `first` on.
inline void pulse(EnvSeries& env, Cell c, int first, double step = 2.0) {
  for (int f = first; f < env.spec.frames; ++f)
    env.temperature[f](c.row, c.col) = 20.0 + ((f - first) % 2 == 0 ? step : 0.0);
}

// Events at the west end in frame 1 only; from frame 2 on they reappear at
// the east end and stay there, out of sight of an agent parked in the west.
inline EnvSeries migration_env() {
  EnvSeries env = blank_env({8, 4, 0.25, 0.0, 0.0, 7, 1.0});
  for (Cell c : {Cell{1, 0}, Cell{1, 1}, Cell{2, 0}, Cell{2, 1}})
    for (int f = 1; f < 7; ++f) env.temperature[f](c.row, c.col) = 22.0;
  for (Cell c : {Cell{1, 6}, Cell{1, 7}, Cell{2, 6}, Cell{2, 7}}) pulse(env, c, 2);
  return env;
}

// Persistent events at three far-apart spots, one per starting agent.
inline EnvSeries tie_env() {
  EnvSeries env = blank_env({12, 12, 0.25, 0.0, 0.0, 7, 1.0});
  for (Cell c : {Cell{2, 2}, Cell{2, 9}, Cell{9, 5}}) pulse(env, c, 1);
  return env;
}

}  // namespace support
