#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "waitr/clustering.hpp"
#include "waitr/env.hpp"
#include "waitr/error.hpp"
#include "waitr/geometry.hpp"

namespace waitr {

enum class NodeKind { waypoint, hazard, bridge };

inline const char* to_string(NodeKind k) {
  switch (k) {
    case NodeKind::waypoint: return "waypoint";
    case NodeKind::hazard: return "hazard";
    case NodeKind::bridge: return "bridge";
  }
  return "?";
}

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct GraphKnobs {
  double connect_radius = 0.6;  // degrees
  int bridge_spacing = 2;       // cells between lattice bridges
  double lambda_edge = 1.0;
  double h_coef = 1.0;          // kInfinity blocks hazardous edges outright
  double hazard_radius = 0.0;   // degrees; 0 means one cell
  double obs_radius = 0.5;      // degrees; support of waypoint event counts

  double effective_hazard_radius(double cell_size) const {
    return hazard_radius > 0.0 ? hazard_radius : cell_size;
  }

  void validate() const {
    if (!(connect_radius > 0.0)) throw Error(ErrorCode::config, "graph.connect_radius must be > 0");
    if (bridge_spacing < 1) throw Error(ErrorCode::config, "graph.bridge_spacing must be >= 1");
    if (!(lambda_edge >= 0.0)) throw Error(ErrorCode::config, "graph.lambda_edge must be >= 0");
    if (!(h_coef >= 0.0)) throw Error(ErrorCode::config, "graph.h_coef must be >= 0");
    if (!(hazard_radius >= 0.0)) throw Error(ErrorCode::config, "graph.hazard_radius must be >= 0");
    if (!(obs_radius > 0.0)) throw Error(ErrorCode::config, "graph.obs_radius must be > 0");
  }
};

struct FrameAttr {
  double W = 0.0;
  int event_count = 0;
  bool active = false;
  double hazard_severity = 0.0;
  double risk = 0.0;  // normalized across waypoints of the frame

  friend bool operator==(const FrameAttr&, const FrameAttr&) = default;
};

struct KNode {
  int id = 0;
  NodeKind kind = NodeKind::bridge;
  Cell cell;
  std::vector<FrameAttr> per_frame;

  friend bool operator==(const KNode&, const KNode&) = default;
};

struct KEdge {
  int a = 0;
  int b = 0;
  double base_distance = 0.0;  // degrees
  std::vector<double> per_frame_weight;

  int other(int id) const { return id == a ? b : a; }

  friend bool operator==(const KEdge&, const KEdge&) = default;
};

// h_coef times the mean severity of hazard cells near segment [a, b].
inline double hazard_penalty(Cell a, Cell b, const std::vector<Hazard>& hazards, double h_coef,
                             double hazard_radius, double cell_size) {
  double sum = 0.0;
  int n = 0;
  for (const Hazard& h : hazards)
    if (point_segment_distance_deg(h.cell, a, b, cell_size) <= hazard_radius + kRadiusEps) {
      sum += h.severity;
      ++n;
    }
  if (n == 0 || h_coef == 0.0) return 0.0;
  if (std::isinf(h_coef)) return kInfinity;
  return h_coef * (sum / n);
}

// Static topology with per-frame node and edge attributes.
class KGraph {
 public:
  KGraph() = default;
  KGraph(GridSpec spec, GraphKnobs knobs, WPRConfig wpr = {})
      : spec_(spec), knobs_(knobs), wpr_(wpr) {}

  const GridSpec& spec() const { return spec_; }
  const GraphKnobs& knobs() const { return knobs_; }
  GraphKnobs& knobs() { return knobs_; }
  const WPRConfig& wpr() const { return wpr_; }
  int frames() const { return spec_.frames; }

  const std::vector<KNode>& nodes() const { return nodes_; }
  const std::vector<KEdge>& edges() const { return edges_; }
  const KNode& node(int id) const {
    check_node(id);
    return nodes_[static_cast<std::size_t>(id)];
  }
  int size() const { return static_cast<int>(nodes_.size()); }

  bool walkable(int id) const { return node(id).kind != NodeKind::hazard; }

  int add_node(NodeKind kind, Cell cell) {
    KNode n;
    n.id = size();
    n.kind = kind;
    n.cell = cell;
    n.per_frame.assign(static_cast<std::size_t>(frames()), FrameAttr{});
    nodes_.push_back(std::move(n));
    adjacency_.emplace_back();
    return nodes_.back().id;
  }

  int add_edge(int a, int b) {
    check_node(a);
    check_node(b);
    if (a == b) throw Error(ErrorCode::invalid_argument, "self-loops are not allowed");
    if (find_edge(a, b)) throw Error(ErrorCode::invalid_argument, "duplicate edge");
    KEdge e;
    e.a = std::min(a, b);
    e.b = std::max(a, b);
    e.base_distance = distance_deg(nodes_[a].cell, nodes_[b].cell, spec_.cell_size);
    e.per_frame_weight.assign(static_cast<std::size_t>(frames()),
                              knobs_.lambda_edge * e.base_distance);
    const int idx = static_cast<int>(edges_.size());
    edges_.push_back(std::move(e));
    insert_sorted(adjacency_[a], {b, idx});
    insert_sorted(adjacency_[b], {a, idx});
    return idx;
  }

  std::optional<int> find_edge(int a, int b) const {
    check_node(a);
    check_node(b);
    const auto& adj = adjacency_[a];
    auto it = std::lower_bound(adj.begin(), adj.end(), std::pair<int, int>{b, -1});
    if (it != adj.end() && it->first == b) return it->second;
    return std::nullopt;
  }

  double edge_weight(int edge, int frame) const {
    check_frame(frame);
    return edges_[static_cast<std::size_t>(edge)].per_frame_weight[frame];
  }

  // (neighbor id, edge index), sorted by neighbor id.
  const std::vector<std::pair<int, int>>& incident(int id) const {
    check_node(id);
    return adjacency_[id];
  }

  // (neighbor id, frame weight), sorted by neighbor id.
  std::vector<std::pair<int, double>> neighbors(int id, int frame) const {
    check_node(id);
    check_frame(frame);
    std::vector<std::pair<int, double>> out;
    for (const auto& [nb, e] : adjacency_[id]) out.emplace_back(nb, edges_[e].per_frame_weight[frame]);
    return out;
  }

  FrameAttr& attr(int id, int frame) {
    check_node(id);
    check_frame(frame);
    return nodes_[id].per_frame[frame];
  }
  const FrameAttr& attr(int id, int frame) const {
    check_node(id);
    check_frame(frame);
    return nodes_[id].per_frame[frame];
  }

  void set_edge_weight(int edge, int frame, double w) {
    check_frame(frame);
    edges_[static_cast<std::size_t>(edge)].per_frame_weight[frame] = w;
  }

  std::vector<int> waypoint_ids() const {
    std::vector<int> out;
    for (const KNode& n : nodes_)
      if (n.kind == NodeKind::waypoint) out.push_back(n.id);
    return out;
  }

  void check_frame(int frame) const {
    if (frame < 0 || frame >= frames())
      throw Error(ErrorCode::out_of_range, "frame " + std::to_string(frame) + " out of range");
  }

  friend bool operator==(const KGraph& x, const KGraph& y) {
    return x.spec_ == y.spec_ && x.nodes_ == y.nodes_ && x.edges_ == y.edges_;
  }

 private:
  void check_node(int id) const {
    if (id < 0 || id >= size())
      throw Error(ErrorCode::unknown_node, "unknown node id " + std::to_string(id));
  }

  static void insert_sorted(std::vector<std::pair<int, int>>& v, std::pair<int, int> item) {
    v.insert(std::upper_bound(v.begin(), v.end(), item), item);
  }

  GridSpec spec_;
  GraphKnobs knobs_;
  WPRConfig wpr_;
  std::vector<KNode> nodes_;
  std::vector<KEdge> edges_;
  std::vector<std::vector<std::pair<int, int>>> adjacency_;
};

class UnionFind {
 public:
  explicit UnionFind(int n) : parent_(static_cast<std::size_t>(n)) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent_[std::max(a, b)] = std::min(a, b);
    return true;
  }

 private:
  std::vector<int> parent_;
};

// Number of connected components among walkable (waypoint + bridge) nodes.
inline int walkable_components(const KGraph& g) {
  UnionFind uf(g.size());
  for (const KEdge& e : g.edges()) uf.unite(e.a, e.b);
  std::set<int> roots;
  for (const KNode& n : g.nodes())
    if (n.kind != NodeKind::hazard) roots.insert(uf.find(n.id));
  return static_cast<int>(roots.size());
}

// Waypoints (cluster order), lattice bridges (row, col order), then hazard
// cells (row, col order). Edges join walkable nodes within connect_radius;
// spanning edges are added when that leaves the graph disconnected.
inline KGraph build_graph(const std::vector<Cluster>& waypoints, const std::vector<Hazard>& hazards,
                          const GridSpec& spec, const GraphKnobs& knobs, const WPRConfig& wpr = {}) {
  spec.validate();
  knobs.validate();
  if (waypoints.empty()) throw Error(ErrorCode::no_waypoints, "no waypoints to build a graph over");

  KGraph g(spec, knobs, wpr);
  std::set<Cell> taken;
  for (const Cluster& c : waypoints)
    if (taken.insert(c.centroid).second) g.add_node(NodeKind::waypoint, c.centroid);
  const std::vector<int> wps = g.waypoint_ids();

  const double exclusion = knobs.connect_radius / 2.0;
  for (int r = 0; r < spec.height; r += knobs.bridge_spacing)
    for (int c = 0; c < spec.width; c += knobs.bridge_spacing) {
      const Cell p{r, c};
      bool near_waypoint = false;
      for (int w : wps)
        if (within_radius(p, g.node(w).cell, exclusion, spec.cell_size)) near_waypoint = true;
      if (!near_waypoint && !taken.count(p)) {
        taken.insert(p);
        g.add_node(NodeKind::bridge, p);
      }
    }

  std::set<Cell> hazard_cells;
  for (const Hazard& h : hazards) hazard_cells.insert(h.cell);
  for (Cell c : hazard_cells) g.add_node(NodeKind::hazard, c);

  std::vector<int> walk;
  for (const KNode& n : g.nodes())
    if (n.kind != NodeKind::hazard) walk.push_back(n.id);

  for (std::size_t i = 0; i < walk.size(); ++i)
    for (std::size_t j = i + 1; j < walk.size(); ++j)
      if (within_radius(g.node(walk[i]).cell, g.node(walk[j]).cell, knobs.connect_radius,
                        spec.cell_size))
        g.add_edge(walk[i], walk[j]);

  if (walkable_components(g) > 1) {
    UnionFind uf(g.size());
    for (const KEdge& e : g.edges()) uf.unite(e.a, e.b);
    std::vector<std::tuple<double, int, int>> pairs;
    for (std::size_t i = 0; i < walk.size(); ++i)
      for (std::size_t j = i + 1; j < walk.size(); ++j)
        pairs.emplace_back(distance_deg(g.node(walk[i]).cell, g.node(walk[j]).cell, spec.cell_size),
                           walk[i], walk[j]);
    std::sort(pairs.begin(), pairs.end());
    for (const auto& [d, a, b] : pairs)
      if (uf.unite(a, b)) g.add_edge(a, b);
  }
  return g;
}

// Refreshes frame-t node attributes and edge weights. `events` and `hazards`
// are those to attribute to this frame; other frames are left untouched.
inline void update_frame(KGraph& g, int frame, const std::vector<Event>& events,
                         const std::vector<Hazard>& hazards, const std::vector<int>& activations) {
  g.check_frame(frame);
  const GridSpec& spec = g.spec();
  const GraphKnobs& k = g.knobs();
  const std::set<int> active(activations.begin(), activations.end());

  std::vector<int> wps;
  std::vector<double> raw_risk;
  for (const KNode& n : g.nodes()) {
    FrameAttr a;
    if (n.kind == NodeKind::waypoint) {
      for (const Event& e : events)
        if (within_radius(n.cell, e.cell, k.obs_radius, spec.cell_size)) a.event_count += e.count;
      for (const Hazard& h : hazards)
        if (within_radius(n.cell, h.cell, k.obs_radius, spec.cell_size))
          a.hazard_severity = std::max(a.hazard_severity, h.severity);
      wps.push_back(n.id);
      raw_risk.push_back(a.hazard_severity);
    } else if (n.kind == NodeKind::hazard) {
      for (const Hazard& h : hazards)
        if (h.cell == n.cell) a.hazard_severity = std::max(a.hazard_severity, h.severity);
    }
    a.active = active.count(n.id) > 0;
    g.attr(n.id, frame) = a;
  }
  const auto risk = minmax_normalize(raw_risk);
  for (std::size_t i = 0; i < wps.size(); ++i) {
    FrameAttr& a = g.attr(wps[i], frame);
    a.risk = risk[i];
    a.W = weight_poi(a.event_count, risk[i], 1.0, g.wpr());
  }

  const double hr = k.effective_hazard_radius(spec.cell_size);
  for (std::size_t e = 0; e < g.edges().size(); ++e) {
    const KEdge& edge = g.edges()[e];
    const double pen = hazard_penalty(g.node(edge.a).cell, g.node(edge.b).cell, hazards, k.h_coef,
                                      hr, spec.cell_size);
    g.set_edge_weight(static_cast<int>(e), frame, k.lambda_edge * edge.base_distance + pen);
  }
}

}  // namespace waitr
