#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "waitr/clustering.hpp"
#include "waitr/error.hpp"
#include "waitr/kgraph.hpp"
#include "waitr/pathlets.hpp"
#include "waitr/ted.hpp"

namespace waitr {

struct PlannerConfig {
  int T = 6;
  double gamma = 0.9;
  double lambda = 0.1;
  double radius = 0.5;  // observational radius, degrees
  int speed = 1;        // edge hops per frame
  int beam = 64;        // 0 keeps every state (exact)

  void validate() const {
    if (T < 1) throw Error(ErrorCode::config, "planner.T must be >= 1");
    if (!(gamma > 0.0 && gamma <= 1.0)) throw Error(ErrorCode::config, "planner.gamma must lie in (0, 1]");
    if (!(lambda >= 0.0)) throw Error(ErrorCode::config, "planner.lambda must be >= 0");
    if (!(radius > 0.0)) throw Error(ErrorCode::config, "planner.radius must be > 0");
    if (speed < 1) throw Error(ErrorCode::config, "planner.speed must be >= 1");
    if (beam < 0) throw Error(ErrorCode::config, "planner.beam must be >= 0");
  }
};

struct AgentState {
  int id = 0;
  int node = 0;
  int pathlet = 0;
  std::vector<int> visited;  // node per elapsed frame
};

struct Plan {
  int agent = 0;
  std::vector<int> waypoints;  // waypoints[t] is the node for step t
  std::vector<double> claimed_reward;
  double projected_score = 0.0;
};

// layers[t][node]: reward for being at `node` t steps ahead.
using RewardLayers = std::vector<std::vector<double>>;

// Per-step sets of reward items (event ids) already collected.
using ClaimSet = std::vector<std::set<int>>;

// Forecast rewards over the horizon. A node's step-t reward is
//   gain[t][node] * (unclaimed share of support[node]) + offset[t][node]
// so once earlier agents claim the events behind a node, only the fixed
// offset (the hazard term) remains.
struct RewardForecast {
  std::vector<std::vector<double>> gain;
  std::vector<std::vector<double>> offset;
  std::vector<std::vector<int>> support;  // sorted item ids per node

  int steps() const { return static_cast<int>(gain.size()); }
  int nodes() const { return gain.empty() ? 0 : static_cast<int>(gain[0].size()); }

  ClaimSet empty_claims() const { return ClaimSet(static_cast<std::size_t>(steps())); }

  double value(int t, int node, const ClaimSet& claims) const {
    const double g = gain.at(static_cast<std::size_t>(t)).at(static_cast<std::size_t>(node));
    const double o = offset[t][node];
    const auto& sup = support.at(static_cast<std::size_t>(node));
    if (sup.empty() || claims.empty()) return g + o;
    std::size_t open = 0;
    for (int id : sup) open += claims[t].count(id) ? 0 : 1;
    if (open == sup.size()) return g + o;
    return g * (static_cast<double>(open) / static_cast<double>(sup.size())) + o;
  }

  RewardLayers layers(const ClaimSet& claims) const {
    RewardLayers out(static_cast<std::size_t>(steps()), std::vector<double>(static_cast<std::size_t>(nodes())));
    for (int t = 0; t < steps(); ++t)
      for (int n = 0; n < nodes(); ++n) out[t][n] = value(t, n, claims);
    return out;
  }

  void claim(int t, int node, ClaimSet& claims) const {
    for (int id : support.at(static_cast<std::size_t>(node))) claims.at(static_cast<std::size_t>(t)).insert(id);
  }

  // Each positive entry becomes its own reward item; nonpositive entries are
  // pure offsets that nobody can claim.
  static RewardForecast from_layers(const RewardLayers& layers) {
    RewardForecast f;
    const std::size_t steps = layers.size();
    const std::size_t n = steps ? layers[0].size() : 0;
    f.gain.assign(steps, std::vector<double>(n, 0.0));
    f.offset.assign(steps, std::vector<double>(n, 0.0));
    f.support.assign(n, {});
    for (std::size_t t = 0; t < steps; ++t)
      for (std::size_t v = 0; v < n; ++v) {
        if (layers[t][v] > 0.0) f.gain[t][v] = layers[t][v];
        else f.offset[t][v] = layers[t][v];
      }
    // item id t * n + v is unique per (step, node)
    for (std::size_t v = 0; v < n; ++v)
      for (std::size_t t = 0; t < steps; ++t)
        if (layers[t][v] > 0.0) f.support[v].push_back(static_cast<int>(t * n + v));
    return f;
  }
};

// Reachability within `speed` hops over traversable edges, priced by the
// pathlet route cost at the planning frame. Memoized per source node.
class TransitionModel {
 public:
  TransitionModel(const KGraph& g, const Pathlets& ps, int frame, int speed)
      : g_(g), ps_(ps), frame_(frame), speed_(speed) {}

  const KGraph& graph() const { return g_; }
  int frame() const { return frame_; }

  // (target, cost) sorted by target; includes staying put at cost 0.
  const std::vector<std::pair<int, double>>& from(int u) {
    auto it = cache_.find(u);
    if (it != cache_.end()) return it->second;
    std::map<int, int> hops{{u, 0}};
    std::queue<int> q;
    q.push(u);
    while (!q.empty()) {
      const int x = q.front();
      q.pop();
      if (hops[x] == speed_) continue;
      for (const auto& [v, e] : g_.incident(x)) {
        if (std::isinf(g_.edge_weight(e, frame_)) || hops.count(v)) continue;
        hops[v] = hops[x] + 1;
        q.push(v);
      }
    }
    std::vector<std::pair<int, double>> out;
    for (const auto& [v, h] : hops) {
      if (v == u) {
        out.emplace_back(v, 0.0);
        continue;
      }
      const Route r = route(ps_, g_, u, v, frame_);
      if (r.found) out.emplace_back(v, r.cost);
    }
    return cache_.emplace(u, std::move(out)).first->second;
  }

  std::optional<double> cost(int u, int v) {
    const auto& ts = from(u);
    auto it = std::lower_bound(ts.begin(), ts.end(), std::pair<int, double>{v, -kInfinity});
    if (it == ts.end() || it->first != v) return std::nullopt;
    return it->second;
  }

 private:
  const KGraph& g_;
  const Pathlets& ps_;
  int frame_;
  int speed_;
  std::map<int, std::vector<std::pair<int, double>>> cache_;
};

inline double step_reward(const RewardLayers& layers, int t, int node) {
  return layers.at(static_cast<std::size_t>(t)).at(static_cast<std::size_t>(node));
}

inline double step_term(double gamma, int t, double reward, double lambda, double travel) {
  return std::pow(gamma, t) * (reward - lambda * travel);
}

// sum_t gamma^t (W_t(node_t) - lambda * cost(node_{t-1}, node_t)), no travel at t = 0.
inline double score_plan(const std::vector<int>& seq, TransitionModel& tm, const RewardLayers& layers,
                         const PlannerConfig& cfg) {
  if (seq.empty() || static_cast<int>(seq.size()) > cfg.T + 1)
    throw Error(ErrorCode::invalid_argument, "plan length must lie in [1, T + 1]");
  double score = 0.0;
  for (std::size_t t = 0; t < seq.size(); ++t) {
    tm.graph().node(seq[t]);
    double travel = 0.0;
    if (t > 0) {
      const auto c = tm.cost(seq[t - 1], seq[t]);
      if (!c)
        throw Error(ErrorCode::invalid_transition,
                    "node " + std::to_string(seq[t]) + " is not reachable from " +
                        std::to_string(seq[t - 1]) + " within one frame");
      travel = *c;
    }
    score += step_term(cfg.gamma, static_cast<int>(t),
                       step_reward(layers, static_cast<int>(t), seq[t]), cfg.lambda, travel);
  }
  return score;
}

namespace detail {

struct Partial {
  double score;
  std::vector<int> seq;
};

inline bool partial_better(const Partial& a, const Partial& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.seq < b.seq;
}

}  // namespace detail

// Best (T + 1)-node sequence from `start`. States ending on the same node
// are merged, so beam = 0 is an exact dynamic program.
inline Plan plan_agent(int agent, int start, TransitionModel& tm, const RewardLayers& layers,
                       const PlannerConfig& cfg) {
  cfg.validate();
  if (static_cast<int>(layers.size()) < cfg.T + 1)
    throw Error(ErrorCode::invalid_argument, "reward layers shorter than the horizon");
  std::map<int, detail::Partial> states;
  states[start] = {step_term(cfg.gamma, 0, step_reward(layers, 0, start), cfg.lambda, 0.0),
                   {start}};
  for (int t = 1; t <= cfg.T; ++t) {
    std::map<int, detail::Partial> next;
    for (const auto& [u, part] : states)
      for (const auto& [v, c] : tm.from(u)) {
        detail::Partial cand{
            part.score + step_term(cfg.gamma, t, step_reward(layers, t, v), cfg.lambda, c),
            part.seq};
        cand.seq.push_back(v);
        auto it = next.find(v);
        if (it == next.end())
          next.emplace(v, std::move(cand));
        else if (detail::partial_better(cand, it->second))
          it->second = std::move(cand);
      }
    if (cfg.beam > 0 && static_cast<int>(next.size()) > cfg.beam) {
      std::vector<detail::Partial> all;
      for (auto& [v, p] : next) all.push_back(std::move(p));
      std::sort(all.begin(), all.end(), detail::partial_better);
      all.resize(static_cast<std::size_t>(cfg.beam));
      next.clear();
      for (auto& p : all) next.emplace(p.seq.back(), std::move(p));
    }
    states = std::move(next);
  }
  const detail::Partial* best = nullptr;
  for (const auto& [v, p] : states)
    if (!best || detail::partial_better(p, *best)) best = &p;

  Plan plan;
  plan.agent = agent;
  plan.waypoints = best->seq;
  plan.projected_score = best->score;
  for (std::size_t t = 0; t < plan.waypoints.size(); ++t)
    plan.claimed_reward.push_back(step_reward(layers, static_cast<int>(t), plan.waypoints[t]));
  return plan;
}

// Agents are planned in id order; each claims the reward items along its
// plan so later agents score them as already collected.
inline std::vector<Plan> plan_waitr(const KGraph& g, const Pathlets& ps,
                                    const std::vector<AgentState>& agents, const RewardForecast& forecast,
                                    const PlannerConfig& cfg, int frame, ClaimSet* claims_out = nullptr) {
  if (agents.empty()) throw Error(ErrorCode::invalid_argument, "no agents to plan for");
  if (forecast.steps() < cfg.T + 1 || forecast.nodes() != g.size())
    throw Error(ErrorCode::invalid_argument, "reward forecast does not match graph and horizon");
  TransitionModel tm(g, ps, frame, cfg.speed);
  std::vector<const AgentState*> order;
  for (const AgentState& a : agents) order.push_back(&a);
  std::sort(order.begin(), order.end(), [](auto* x, auto* y) { return x->id < y->id; });

  ClaimSet claims = forecast.empty_claims();
  std::vector<Plan> plans;
  for (const AgentState* a : order) {
    Plan p = plan_agent(a->id, a->node, tm, forecast.layers(claims), cfg);
    for (std::size_t t = 0; t < p.waypoints.size(); ++t)
      forecast.claim(static_cast<int>(t), p.waypoints[t], claims);
    plans.push_back(std::move(p));
  }
  std::sort(plans.begin(), plans.end(), [](const Plan& x, const Plan& y) { return x.agent < y.agent; });
  if (claims_out) *claims_out = std::move(claims);
  return plans;
}

inline std::vector<Plan> plan_waitr(const KGraph& g, const Pathlets& ps,
                                    const std::vector<AgentState>& agents, const RewardLayers& layers,
                                    const PlannerConfig& cfg, int frame) {
  return plan_waitr(g, ps, agents, RewardForecast::from_layers(layers), cfg, frame);
}

// Rewards over the horizon from the graph's frame attributes. Step 0 uses
// the observed counts; step k the predicted count at confidence decay^k.
// Each waypoint's gain is backed by the ids (indices into `events`) of the
// events within its observational radius. `rates` holds the density rate
// per node id, empty when unknown.
inline RewardForecast build_reward_forecast(const KGraph& g, int frame, const std::vector<Event>& events,
                                            const std::vector<double>& rates, const TEDConfig& ted, int T) {
  const std::size_t n = static_cast<std::size_t>(g.size());
  RewardForecast f;
  f.gain.assign(static_cast<std::size_t>(T + 1), std::vector<double>(n, 0.0));
  f.offset.assign(static_cast<std::size_t>(T + 1), std::vector<double>(n, 0.0));
  f.support.assign(n, {});
  TEDConfig tc = ted;
  tc.horizon = std::max(ted.horizon, T);
  const auto conf = forecast_confidence(tc);
  const WPRConfig& w = g.wpr();
  for (const KNode& node : g.nodes()) {
    if (node.kind != NodeKind::waypoint) continue;
    for (std::size_t i = 0; i < events.size(); ++i)
      if (within_radius(node.cell, events[i].cell, g.knobs().obs_radius, g.spec().cell_size))
        f.support[node.id].push_back(static_cast<int>(i));
    const FrameAttr& a = g.attr(node.id, frame);
    const double rate = rates.empty() ? 0.0 : rates.at(static_cast<std::size_t>(node.id));
    for (int k = 0; k <= T; ++k) {
      const double c = k == 0 ? 1.0 : conf[static_cast<std::size_t>(k - 1)];
      const double v = k == 0 ? a.event_count : forecast_value(a.event_count, rate, k, ted.predictor);
      f.gain[k][node.id] = weight_poi(v, 0.0, c, w);
      f.offset[k][node.id] = -w.beta * a.risk;
    }
  }
  return f;
}

// One greedy step per agent: among waypoints within the observational
// radius that still hold events, head for the highest count, nearest on
// ties, lowest id after that. Agents with nothing in range stay put.
inline std::vector<Plan> plan_greedy(const KGraph& g, const Pathlets& ps,
                                     const std::vector<AgentState>& agents, const PlannerConfig& cfg,
                                     int frame) {
  const double cs = g.spec().cell_size;
  std::vector<Plan> plans;
  for (const AgentState& a : agents) {
    const Cell here = g.node(a.node).cell;
    std::optional<int> target;
    int best_count = 0;
    double best_dist = 0.0;
    for (int w : g.waypoint_ids()) {
      const int count = g.attr(w, frame).event_count;
      if (count < 1 || !within_radius(here, g.node(w).cell, cfg.radius, cs)) continue;
      const double d = distance_deg(here, g.node(w).cell, cs);
      if (!target || count > best_count || (count == best_count && d < best_dist)) {
        target = w;
        best_count = count;
        best_dist = d;
      }
    }
    Plan p;
    p.agent = a.id;
    p.waypoints = {a.node, a.node};
    if (target) {
      const Route r = route(ps, g, a.node, *target, frame);
      if (r.found) p.waypoints[1] = r.path[static_cast<std::size_t>(std::min(cfg.speed, r.hops()))];
      p.projected_score = best_count;
    }
    p.claimed_reward = {0.0, static_cast<double>(best_count)};
    plans.push_back(std::move(p));
  }
  return plans;
}

}  // namespace waitr
