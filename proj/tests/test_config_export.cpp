#include <gtest/gtest.h>

#include <filesystem>
#include <json.hpp>

#include "support.hpp"

using namespace waitr;
using nlohmann::json;

TEST(Config, Defaults) {
  const RunConfig cfg;
  EXPECT_EQ(cfg.mission.planner.T, 6);
  EXPECT_EQ(cfg.mission.planner.gamma, 0.9);
  EXPECT_EQ(cfg.mission.radius, 0.5);
  EXPECT_EQ(cfg.mission.agents, 3);
  EXPECT_EQ(cfg.mission.tau_poi, 1.0);
  EXPECT_EQ(cfg.mission.tau_haz, 0.5);
  EXPECT_EQ(cfg.seeds.size(), 20u);
  EXPECT_NO_THROW(cfg.validate());
}

TEST(Config, NestedDocumentApplies) {
  const RunConfig cfg = apply_config_json(R"({"planner": {"T": 4, "gamma": 0.8}, "mission": {"agents": 2},
                                              "graph": {"h_coef": "inf"}, "seeds": [3, 5]})");
  EXPECT_EQ(cfg.mission.planner.T, 4);
  EXPECT_EQ(cfg.mission.planner.gamma, 0.8);
  EXPECT_EQ(cfg.mission.agents, 2);
  EXPECT_TRUE(std::isinf(cfg.mission.graph.h_coef));
  EXPECT_EQ(cfg.seeds, (std::vector<std::uint64_t>{3, 5}));
  EXPECT_EQ(cfg.mission.radius, 0.5);
}

TEST(Config, UnknownKeyIsRejected) {
  for (const char* text : {R"({"planner": {"horizon": 3}})", R"({"agents": 3})", R"({"mission": {"radiuss": 1}})"}) {
    try {
      apply_config_json(text);
      FAIL() << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::config);
    }
  }
  RunConfig cfg;
  EXPECT_THROW(apply_override(cfg, "planner.nope=1"), Error);
  EXPECT_THROW(apply_override(cfg, "no_equals_sign"), Error);
}

TEST(Config, BadValuesAreRejected) {
  EXPECT_THROW(apply_config_json(R"({"planner": {"T": "six"}})"), Error);
  EXPECT_THROW(apply_config_json("not json"), Error);
  EXPECT_THROW(apply_config_json("[1, 2]"), Error);
  RunConfig cfg = apply_config_json(R"({"planner": {"gamma": 1.5}})");
  EXPECT_THROW(cfg.validate(), Error);
  cfg = apply_config_json(R"({"mission": {"agents": 0}})");
  EXPECT_THROW(cfg.validate(), Error);
}

TEST(Config, OverridesBeatFileValues) {
  const std::string path = (std::filesystem::temp_directory_path() / "waitr_cfg_test.json").string();
  write_text(path, R"({"planner": {"T": 3}, "mission": {"radius": 0.75}})");
  RunConfig cfg = load_config(path);
  EXPECT_EQ(cfg.mission.planner.T, 3);
  apply_override(cfg, "planner.T=5");
  apply_override(cfg, "ted.predictor=linear_trend");
  apply_override(cfg, "graph.h_coef=inf");
  EXPECT_EQ(cfg.mission.planner.T, 5);
  EXPECT_EQ(cfg.mission.radius, 0.75);
  EXPECT_EQ(cfg.mission.ted.predictor, PredictorKind::linear_trend);
  EXPECT_TRUE(std::isinf(cfg.mission.graph.h_coef));
  std::filesystem::remove(path);
  EXPECT_THROW(load_config("/nonexistent/waitr.json"), Error);
}

TEST(Config, JsonRoundTrip) {
  RunConfig cfg;
  apply_override(cfg, "planner.lambda=0.25");
  apply_override(cfg, "grid.width=31");
  const RunConfig back = apply_config_json(config_to_json(cfg).dump());
  EXPECT_EQ(config_to_json(back), config_to_json(cfg));
  EXPECT_EQ(back.grid.width, 31);
}

TEST(Config, SampleConfigLoads) {
  const RunConfig cfg = load_config(std::string(WAITR_SOURCE_DIR) + "/configs/default.json");
  EXPECT_EQ(config_to_json(cfg), config_to_json(RunConfig{}));
}

TEST(Export, NumberFormatting) {
  EXPECT_EQ(fmt_num(0.0), "0");
  EXPECT_EQ(fmt_num(2.5), "2.5");
  EXPECT_EQ(fmt_num(0.1), "0.1");
  EXPECT_EQ(fmt_num(kInfinity), "inf");
  EXPECT_EQ(fmt_percent(1, 3), "33.33");
  EXPECT_EQ(fmt_percent(0, 0), "0.00");
}

namespace {

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start < s.size()) {
    const auto end = s.find('\n', start);
    out.push_back(s.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

}  // namespace

TEST(Export, CsvHeadersAndRowCounts) {
  const auto p = support::prepared(7);
  const MetricsReport r = run_mission(p.scn, PlannerKind::waitr, MissionConfig{}, 7);
  auto m = lines(metrics_csv(r));
  EXPECT_EQ(m[0], "planner,seed,frame,newly_covered,cumulative_covered,hazard_exposure_steps");
  EXPECT_EQ(m.size(), 1u + 7u);
  EXPECT_EQ(m[1].substr(0, 8), "waitr,7,");
  auto c = lines(clusters_csv(p.scn.clusters));
  EXPECT_EQ(c[0], "rank,centroid_row,centroid_col,score,covered_count");
  EXPECT_EQ(c.size(), p.scn.clusters.size() + 1);
  EXPECT_EQ(lines(activations_csv(r.activations))[0], "frame,node_id,rate,activated");
  EXPECT_EQ(lines(plans_csv(r.steps)).size(), r.steps.size() + 1);
  EXPECT_EQ(lines(edges_csv(p.g)).size(), p.g.edges().size() * 7 + 1);
  EXPECT_EQ(lines(nodes_csv(p.g)).size(), static_cast<std::size_t>(p.g.size()) * 7 + 1);
}

TEST(Export, SummaryWithOneSeed) {
  const auto table = compare(support::tie_env(), MissionConfig{}, {0});
  const auto s = lines(summary_csv(table));
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s[0], "planner,frame_0,frame_1,frame_2,frame_3,frame_4,frame_5,frame_6,covered,total_events,percent,"
                  "seeds_won,result");
  EXPECT_EQ(s[1].substr(0, 6), "waitr,");
  EXPECT_EQ(s[2].substr(0, 7), "greedy,");
  EXPECT_EQ(s[1].substr(s[1].size() - 6), ",0,tie");
  EXPECT_EQ(s[2].substr(s[2].size() - 6), ",0,tie");
}

TEST(Export, GeoJsonIsValidFeatureCollection) {
  const auto p = support::prepared(7);
  const json doc = json::parse(frame_geojson(p.g, 3, p.scn.start_nodes));
  EXPECT_EQ(doc["type"], "FeatureCollection");
  std::size_t points = 0, lines_n = 0, agents = 0;
  for (const json& f : doc["features"]) {
    EXPECT_EQ(f["type"], "Feature");
    const std::string t = f["geometry"]["type"];
    if (t == "Point") {
      ++points;
      const auto& xy = f["geometry"]["coordinates"];
      ASSERT_EQ(xy.size(), 2u);
      EXPECT_GE(xy[0].get<double>(), -90.0);
      EXPECT_LE(xy[1].get<double>(), 25.0 + 20 * 0.2);
      if (f["properties"]["kind"] == "agent") ++agents;
    } else {
      EXPECT_EQ(t, "LineString");
      EXPECT_EQ(f["geometry"]["coordinates"].size(), 2u);
      ++lines_n;
    }
  }
  EXPECT_EQ(points, static_cast<std::size_t>(p.g.size()) + p.scn.start_nodes.size());
  EXPECT_EQ(lines_n, p.g.edges().size());
  EXPECT_EQ(agents, p.scn.start_nodes.size());
}

TEST(Export, BlockedEdgeWeightIsInfString) {
  const auto hs = support::hazard_two_route(kInfinity);
  MissionTrace trace;
  run_mission(hs.scn, PlannerKind::waitr, hs.cfg, 0, &trace);
  const json doc = json::parse(frame_geojson(trace.graph, 2));
  int inf = 0;
  for (const json& f : doc["features"])
    if (f["properties"].contains("weight") && f["properties"]["weight"].is_string()) {
      EXPECT_EQ(f["properties"]["weight"], "inf");
      ++inf;
    }
  EXPECT_GT(inf, 0);
}

TEST(Export, SvgShowsAgentsAndObservationCircle) {
  const auto p = support::prepared(7);
  const std::string svg = frame_svg(p.g, 2, {p.scn.start_nodes[0]}, 0.5);
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  EXPECT_NE(svg.find("<polygon"), std::string::npos);
  EXPECT_NE(svg.find("stroke-dasharray"), std::string::npos);
  // 0.5 degrees is 2.5 cells of 24 px
  EXPECT_NE(svg.find("r=\"60\""), std::string::npos);
  EXPECT_EQ(frame_svg(p.g, 2, {}, 0.5).find("<polygon"), std::string::npos);
}
