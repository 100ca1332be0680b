#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "waitr/error.hpp"
#include "waitr/kgraph.hpp"

namespace waitr {

// Dense all-pairs table over a pathlet's local indices. Unreachable pairs
// hold an infinite cost and next_hop -1.
struct PathletTable {
  int n = 0;
  std::vector<double> cost;
  std::vector<int> next_hop;  // global node id of the first step

  double cost_at(int i, int j) const { return cost[static_cast<std::size_t>(i) * n + j]; }
  int next_at(int i, int j) const { return next_hop[static_cast<std::size_t>(i) * n + j]; }

  friend bool operator==(const PathletTable&, const PathletTable&) = default;
};

struct Pathlet {
  int id = 0;
  Cell block;                     // (row / block, col / block)
  std::vector<int> node_ids;      // sorted
  std::vector<int> boundary_ids;  // sorted; nodes with an edge leaving the pathlet
  std::map<int, PathletTable> tables;

  std::optional<int> local(int node) const {
    auto it = std::lower_bound(node_ids.begin(), node_ids.end(), node);
    if (it == node_ids.end() || *it != node) return std::nullopt;
    return static_cast<int>(it - node_ids.begin());
  }
  bool contains(int node) const { return local(node).has_value(); }
  bool is_boundary(int node) const {
    return std::binary_search(boundary_ids.begin(), boundary_ids.end(), node);
  }
};

struct Pathlets {
  int block = 1;
  std::vector<Pathlet> items;
  std::vector<int> owner;  // node id -> pathlet id

  const Pathlet& of(int node) const { return items[static_cast<std::size_t>(owner.at(node))]; }
};

// Pathlet side length in cells: how far an agent moving `speed` lattice hops
// per frame travels over a horizon of T frames.
inline int speed_adjusted_block(int speed, int horizon, int bridge_spacing) {
  return std::max(1, speed * horizon * bridge_spacing);
}

inline Pathlets partition(const KGraph& g, int block) {
  if (block < 1) throw Error(ErrorCode::invalid_argument, "pathlet block must be >= 1");
  std::map<Cell, std::vector<int>> groups;
  for (const KNode& n : g.nodes()) groups[{n.cell.row / block, n.cell.col / block}].push_back(n.id);

  Pathlets out;
  out.block = block;
  out.owner.assign(static_cast<std::size_t>(g.size()), -1);
  for (auto& [key, ids] : groups) {
    Pathlet p;
    p.id = static_cast<int>(out.items.size());
    p.block = key;
    p.node_ids = ids;
    for (int id : ids) out.owner[id] = p.id;
    out.items.push_back(std::move(p));
  }
  for (Pathlet& p : out.items) {
    for (int id : p.node_ids)
      for (const auto& [nb, e] : g.incident(id))
        if (out.owner[nb] != p.id) {
          p.boundary_ids.push_back(id);
          break;
        }
  }
  return out;
}

namespace detail {

// Single-source shortest paths restricted to `p`, returned in local indices.
inline void pathlet_dijkstra(const Pathlet& p, const KGraph& g, int frame, int src_local,
                             std::vector<double>& dist, std::vector<int>& first) {
  const int n = static_cast<int>(p.node_ids.size());
  dist.assign(static_cast<std::size_t>(n), kInfinity);
  first.assign(static_cast<std::size_t>(n), -1);
  using Item = std::pair<double, int>;  // (dist, global id)
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[src_local] = 0.0;
  first[src_local] = p.node_ids[src_local];
  pq.emplace(0.0, p.node_ids[src_local]);
  std::vector<bool> done(static_cast<std::size_t>(n), false);
  while (!pq.empty()) {
    const auto [d, u] = pq.top();
    pq.pop();
    const int ul = *p.local(u);
    if (done[ul]) continue;
    done[ul] = true;
    for (const auto& [v, e] : g.incident(u)) {
      const auto vl = p.local(v);
      if (!vl) continue;
      const double w = g.edge_weight(e, frame);
      if (std::isinf(w)) continue;
      const double nd = d + w;
      if (nd < dist[*vl]) {
        dist[*vl] = nd;
        first[*vl] = (ul == src_local) ? v : first[ul];
        pq.emplace(nd, v);
      }
    }
  }
}

inline std::vector<double> induced_weights(const Pathlet& p, const KGraph& g, int frame) {
  std::vector<double> w;
  for (int id : p.node_ids)
    for (const auto& [nb, e] : g.incident(id))
      if (nb > id && p.contains(nb)) w.push_back(g.edge_weight(e, frame));
  return w;
}

}  // namespace detail

inline void precompute_tables(Pathlet& p, const KGraph& g, int frame) {
  g.check_frame(frame);
  const int n = static_cast<int>(p.node_ids.size());
  PathletTable t;
  t.n = n;
  t.cost.assign(static_cast<std::size_t>(n) * n, kInfinity);
  t.next_hop.assign(static_cast<std::size_t>(n) * n, -1);
  std::vector<double> dist;
  std::vector<int> first;
  for (int s = 0; s < n; ++s) {
    detail::pathlet_dijkstra(p, g, frame, s, dist, first);
    for (int d = 0; d < n; ++d) {
      t.cost[static_cast<std::size_t>(s) * n + d] = dist[d];
      t.next_hop[static_cast<std::size_t>(s) * n + d] = first[d];
    }
  }
  p.tables[frame] = std::move(t);
}

// Computes frame tables for every pathlet, reusing the previous frame's
// table when none of the pathlet's internal edge weights changed. Returns
// the number of pathlets actually recomputed.
inline int refresh_tables(Pathlets& ps, const KGraph& g, int frame) {
  g.check_frame(frame);
  int recomputed = 0;
  for (Pathlet& p : ps.items) {
    std::optional<int> prev;
    for (const auto& [f, table] : p.tables)
      if (f < frame) prev = f;
    if (prev && detail::induced_weights(p, g, *prev) == detail::induced_weights(p, g, frame)) {
      p.tables[frame] = p.tables.at(*prev);
      continue;
    }
    precompute_tables(p, g, frame);
    ++recomputed;
  }
  return recomputed;
}

struct Route {
  bool found = false;
  double cost = kInfinity;
  std::vector<int> path;

  int hops() const { return path.empty() ? 0 : static_cast<int>(path.size()) - 1; }
};

// Left fold of frame weights along `path`.
inline double path_cost(const KGraph& g, const std::vector<int>& path, int frame) {
  double c = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) {
    const auto e = g.find_edge(path[i - 1], path[i]);
    if (!e) throw Error(ErrorCode::invalid_transition, "path uses a missing edge");
    c += g.edge_weight(*e, frame);
  }
  return c;
}

namespace detail {

inline const PathletTable& table_for(const Pathlet& p, int frame) {
  auto it = p.tables.find(frame);
  if (it == p.tables.end())
    throw Error(ErrorCode::out_of_range,
                "pathlet " + std::to_string(p.id) + " has no table for frame " + std::to_string(frame));
  return it->second;
}

inline void append_table_path(const Pathlet& p, const PathletTable& t, int src, int dst,
                              std::vector<int>& path) {
  int cur = src;
  const int dl = *p.local(dst);
  while (cur != dst) {
    cur = t.next_at(*p.local(cur), dl);
    path.push_back(cur);
  }
}

}  // namespace detail

// Shortest route at `frame`. Same-pathlet pairs come straight from the
// lookup table; everything else searches over boundary nodes, stitching
// table segments with the edges that cross between pathlets.
inline Route route(const Pathlets& ps, const KGraph& g, int src, int dst, int frame) {
  g.check_frame(frame);
  g.node(src);
  g.node(dst);
  Route r;
  if (src == dst) {
    r.found = true;
    r.cost = 0.0;
    r.path = {src};
    return r;
  }
  const Pathlet& ps_src = ps.of(src);
  if (ps.owner[src] == ps.owner[dst]) {
    const PathletTable& t = detail::table_for(ps_src, frame);
    if (!std::isinf(t.cost_at(*ps_src.local(src), *ps_src.local(dst)))) {
      r.found = true;
      r.cost = t.cost_at(*ps_src.local(src), *ps_src.local(dst));
      r.path = {src};
      detail::append_table_path(ps_src, t, src, dst, r.path);
      return r;
    }
  }

  // Abstract search. Predecessor records whether the hop was a table
  // segment (true) or a direct crossing edge (false).
  std::map<int, double> dist;
  std::map<int, std::pair<int, bool>> pred;
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[src] = 0.0;
  pq.emplace(0.0, src);
  std::map<int, bool> done;
  auto relax = [&](int from, int to, double nd, bool via_table) {
    auto it = dist.find(to);
    if (it == dist.end() || nd < it->second) {
      dist[to] = nd;
      pred[to] = {from, via_table};
      pq.emplace(nd, to);
    }
  };
  while (!pq.empty()) {
    const auto [d, u] = pq.top();
    pq.pop();
    if (done[u]) continue;
    done[u] = true;
    if (u == dst) break;
    const Pathlet& p = ps.of(u);
    const PathletTable& t = detail::table_for(p, frame);
    const int ul = *p.local(u);
    for (int b : p.boundary_ids) {
      if (b == u) continue;
      const double c = t.cost_at(ul, *p.local(b));
      if (!std::isinf(c)) relax(u, b, d + c, true);
    }
    if (p.contains(dst) && dst != u) {
      const double c = t.cost_at(ul, *p.local(dst));
      if (!std::isinf(c)) relax(u, dst, d + c, true);
    }
    if (p.is_boundary(u))
      for (const auto& [v, e] : g.incident(u)) {
        if (ps.owner[v] == p.id) continue;
        const double w = g.edge_weight(e, frame);
        if (!std::isinf(w)) relax(u, v, d + w, false);
      }
  }
  if (!dist.count(dst)) return r;

  std::vector<std::pair<int, bool>> hops;  // (node, reached via table)
  for (int cur = dst; cur != src; cur = pred.at(cur).first) hops.emplace_back(cur, pred.at(cur).second);
  std::reverse(hops.begin(), hops.end());
  r.path = {src};
  for (const auto& [node, via_table] : hops) {
    const int from = r.path.back();
    if (via_table) {
      const Pathlet& p = ps.of(from);
      detail::append_table_path(p, detail::table_for(p, frame), from, node, r.path);
    } else {
      r.path.push_back(node);
    }
  }
  r.found = true;
  r.cost = path_cost(g, r.path, frame);
  return r;
}

}  // namespace waitr
