#pragma once

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include <json.hpp>

#include "waitr/clustering.hpp"
#include "waitr/error.hpp"
#include "waitr/kgraph.hpp"
#include "waitr/pathlets.hpp"
#include "waitr/sim.hpp"

namespace waitr {

// Shortest round-trip decimal form; "inf" for infinities.
inline std::string fmt_num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string fmt_percent(int covered, int total) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), 100.0 * ecr(covered, total), std::chars_format::fixed, 2);
  return std::string(buf, res.ptr);
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io, "cannot open for writing: " + path);
  out << text;
  if (!out) throw Error(ErrorCode::io, "write failed: " + path);
}

inline std::string clusters_csv(const std::vector<Cluster>& clusters) {
  std::string s = "rank,centroid_row,centroid_col,score,covered_count\n";
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    const Cluster& c = clusters[i];
    s += std::to_string(i + 1) + "," + std::to_string(c.centroid.row) + "," + std::to_string(c.centroid.col) +
         "," + fmt_num(c.score) + "," + std::to_string(c.covered_count) + "\n";
  }
  return s;
}

inline std::string activations_csv(const std::vector<Activation>& acts) {
  std::string s = "frame,node_id,rate,activated\n";
  for (const Activation& a : acts)
    s += std::to_string(a.frame) + "," + std::to_string(a.node) + "," + fmt_num(a.rate) + "," +
         (a.activated ? "1" : "0") + "\n";
  return s;
}

inline std::string nodes_csv(const KGraph& g) {
  std::string s = "id,kind,row,col,frame,W,active\n";
  for (const KNode& n : g.nodes())
    for (int f = 0; f < g.frames(); ++f) {
      const FrameAttr& a = g.attr(n.id, f);
      s += std::to_string(n.id) + "," + to_string(n.kind) + "," + std::to_string(n.cell.row) + "," +
           std::to_string(n.cell.col) + "," + std::to_string(f) + "," + fmt_num(a.W) + "," +
           (a.active ? "1" : "0") + "\n";
    }
  return s;
}

inline std::string edges_csv(const KGraph& g) {
  std::string s = "a,b,frame,weight\n";
  for (std::size_t e = 0; e < g.edges().size(); ++e)
    for (int f = 0; f < g.frames(); ++f)
      s += std::to_string(g.edges()[e].a) + "," + std::to_string(g.edges()[e].b) + "," + std::to_string(f) + "," +
           fmt_num(g.edge_weight(static_cast<int>(e), f)) + "\n";
  return s;
}

inline std::string tables_csv(const Pathlets& ps) {
  std::string s = "pathlet,frame,src,dst,cost,next_hop\n";
  for (const Pathlet& p : ps.items)
    for (const auto& [frame, t] : p.tables)
      for (int i = 0; i < t.n; ++i)
        for (int j = 0; j < t.n; ++j) {
          if (std::isinf(t.cost_at(i, j))) continue;
          s += std::to_string(p.id) + "," + std::to_string(frame) + "," + std::to_string(p.node_ids[i]) + "," +
               std::to_string(p.node_ids[j]) + "," + fmt_num(t.cost_at(i, j)) + "," +
               std::to_string(t.next_at(i, j)) + "\n";
        }
  return s;
}

inline std::string plans_csv(const std::vector<PlanStep>& steps) {
  std::string s = "agent,frame,node,row,col,claimed_reward\n";
  for (const PlanStep& p : steps)
    s += std::to_string(p.agent) + "," + std::to_string(p.frame) + "," + std::to_string(p.node) + "," +
         std::to_string(p.cell.row) + "," + std::to_string(p.cell.col) + "," + fmt_num(p.claimed_reward) + "\n";
  return s;
}

inline std::string metrics_header() { return "planner,seed,frame,newly_covered,cumulative_covered,hazard_exposure_steps\n"; }

inline std::string metrics_rows(const MetricsReport& r) {
  std::string s;
  for (const FrameMetrics& m : r.per_frame)
    s += r.planner + "," + std::to_string(r.seed) + "," + std::to_string(m.frame) + "," +
         std::to_string(m.newly_covered) + "," + std::to_string(m.cumulative_covered) + "," +
         std::to_string(m.hazard_exposure_steps) + "\n";
  return s;
}

inline std::string metrics_csv(const MetricsReport& r) { return metrics_header() + metrics_rows(r); }

// One row per planner: covered counts per frame summed over seeds, then the
// total, the event total, the percentage and the outcome against the other
// planner.
inline std::string summary_csv(const ComparisonTable& t) {
  int frames = 0;
  for (const SeedComparison& r : t.rows) frames = std::max(frames, static_cast<int>(r.waitr.per_frame.size()));
  std::string s = "planner";
  for (int f = 0; f < frames; ++f) s += ",frame_" + std::to_string(f);
  s += ",covered,total_events,percent,seeds_won,result\n";
  auto row = [&](const std::string& name, bool waitr) {
    std::vector<int> per(static_cast<std::size_t>(frames), 0);
    for (const SeedComparison& r : t.rows) {
      const MetricsReport& m = waitr ? r.waitr : r.greedy;
      for (const FrameMetrics& fm : m.per_frame) per[static_cast<std::size_t>(fm.frame)] += fm.newly_covered;
    }
    const int mine = waitr ? t.waitr_total : t.greedy_total;
    const int theirs = waitr ? t.greedy_total : t.waitr_total;
    std::string line = name;
    for (int v : per) line += "," + std::to_string(v);
    line += "," + std::to_string(mine) + "," + std::to_string(t.total_events) + "," +
            fmt_percent(mine, t.total_events) + "," + std::to_string(waitr ? t.waitr_wins : t.greedy_wins) + "," +
            (mine > theirs ? "win" : mine < theirs ? "loss" : "tie") + "\n";
    return line;
  };
  return s + row("waitr", true) + row("greedy", false);
}

inline double cell_lat(const GridSpec& spec, Cell c) { return spec.origin_lat + c.row * spec.cell_size; }
inline double cell_lon(const GridSpec& spec, Cell c) { return spec.origin_lon + c.col * spec.cell_size; }

// Nodes as points and edges as line strings at `frame`; blocked edges
// carry weight "inf". Agent positions are extra points of kind "agent".
inline std::string frame_geojson(const KGraph& g, int frame, const std::vector<int>& agent_nodes = {}) {
  using nlohmann::json;
  g.check_frame(frame);
  const GridSpec& spec = g.spec();
  auto point = [&](Cell c) { return json::array({cell_lon(spec, c), cell_lat(spec, c)}); };
  json features = json::array();
  for (const KNode& n : g.nodes()) {
    const FrameAttr& a = g.attr(n.id, frame);
    features.push_back({{"type", "Feature"},
                        {"geometry", {{"type", "Point"}, {"coordinates", point(n.cell)}}},
                        {"properties",
                         {{"id", n.id},
                          {"kind", to_string(n.kind)},
                          {"row", n.cell.row},
                          {"col", n.cell.col},
                          {"W", a.W},
                          {"event_count", a.event_count},
                          {"active", a.active},
                          {"hazard_severity", a.hazard_severity}}}});
  }
  for (std::size_t e = 0; e < g.edges().size(); ++e) {
    const KEdge& ed = g.edges()[e];
    const double w = g.edge_weight(static_cast<int>(e), frame);
    features.push_back(
        {{"type", "Feature"},
         {"geometry",
          {{"type", "LineString"},
           {"coordinates", json::array({point(g.node(ed.a).cell), point(g.node(ed.b).cell)})}}},
         {"properties", {{"a", ed.a}, {"b", ed.b}, {"weight", std::isinf(w) ? json("inf") : json(w)}}}});
  }
  for (std::size_t i = 0; i < agent_nodes.size(); ++i)
    features.push_back({{"type", "Feature"},
                        {"geometry", {{"type", "Point"}, {"coordinates", point(g.node(agent_nodes[i]).cell)}}},
                        {"properties", {{"kind", "agent"}, {"agent", i}, {"node", agent_nodes[i]}}}});
  json doc = {{"type", "FeatureCollection"}, {"properties", {{"frame", frame}}}, {"features", features}};
  return doc.dump(1) + "\n";
}

// Top-down map of one frame: grey edges, hazard squares, waypoint circles
// (filled when active), agents as stars with a dotted observation circle.
inline std::string frame_svg(const KGraph& g, int frame, const std::vector<int>& agent_nodes, double obs_radius) {
  g.check_frame(frame);
  const GridSpec& spec = g.spec();
  const double px = 24.0;
  const double pad = px;
  auto x = [&](Cell c) { return pad + (c.col + 0.5) * px; };
  auto y = [&](Cell c) { return pad + (c.row + 0.5) * px; };
  const double width = spec.width * px + 2 * pad;
  const double height = spec.height * px + 2 * pad;
  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt_num(width) + "\" height=\"" +
                  fmt_num(height) + "\">\n";
  s += "<rect x=\"0\" y=\"0\" width=\"" + fmt_num(width) + "\" height=\"" + fmt_num(height) +
       "\" fill=\"#f4f8fb\"/>\n";
  s += "<text x=\"4\" y=\"14\" font-size=\"12\">frame " + std::to_string(frame) + "</text>\n";
  for (std::size_t e = 0; e < g.edges().size(); ++e) {
    const KEdge& ed = g.edges()[e];
    const bool blocked = std::isinf(g.edge_weight(static_cast<int>(e), frame));
    const Cell a = g.node(ed.a).cell, b = g.node(ed.b).cell;
    s += "<line x1=\"" + fmt_num(x(a)) + "\" y1=\"" + fmt_num(y(a)) + "\" x2=\"" + fmt_num(x(b)) + "\" y2=\"" +
         fmt_num(y(b)) + "\" stroke=\"" + (blocked ? "#e0a0a0" : "#c8c8c8") + "\" stroke-width=\"1\"/>\n";
  }
  for (const KNode& n : g.nodes()) {
    const FrameAttr& a = g.attr(n.id, frame);
    if (n.kind == NodeKind::hazard) {
      if (a.hazard_severity <= 0.0) continue;
      s += "<rect x=\"" + fmt_num(x(n.cell) - px / 4) + "\" y=\"" + fmt_num(y(n.cell) - px / 4) + "\" width=\"" +
           fmt_num(px / 2) + "\" height=\"" + fmt_num(px / 2) + "\" fill=\"#d9534f\"/>\n";
    } else if (n.kind == NodeKind::waypoint) {
      s += "<circle cx=\"" + fmt_num(x(n.cell)) + "\" cy=\"" + fmt_num(y(n.cell)) + "\" r=\"" + fmt_num(px / 4) +
           "\" fill=\"" + (a.active ? "#2b7bb9" : "none") + "\" stroke=\"#2b7bb9\"/>\n";
    } else {
      s += "<circle cx=\"" + fmt_num(x(n.cell)) + "\" cy=\"" + fmt_num(y(n.cell)) + "\" r=\"2\" fill=\"#999\"/>\n";
    }
  }
  const double r_px = obs_radius / spec.cell_size * px;
  for (int node : agent_nodes) {
    const Cell c = g.node(node).cell;
    s += "<circle cx=\"" + fmt_num(x(c)) + "\" cy=\"" + fmt_num(y(c)) + "\" r=\"" + fmt_num(r_px) +
         "\" fill=\"none\" stroke=\"#333\" stroke-dasharray=\"2,3\"/>\n";
    std::string pts;
    for (int k = 0; k < 10; ++k) {
      const double ang = -std::numbers::pi / 2 + k * std::numbers::pi / 5;
      const double rad = (k % 2 == 0) ? px / 2 : px / 5;
      pts += (k ? " " : "") + fmt_num(std::round((x(c) + rad * std::cos(ang)) * 100) / 100) + "," +
             fmt_num(std::round((y(c) + rad * std::sin(ang)) * 100) / 100);
    }
    s += "<polygon points=\"" + pts + "\" fill=\"#f0ad4e\" stroke=\"#333\"/>\n";
  }
  s += "</svg>\n";
  return s;
}

}  // namespace waitr
