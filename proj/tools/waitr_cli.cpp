#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "waitr/waitr.hpp"

namespace fs = std::filesystem;
using namespace waitr;

namespace {

// Failures caused by the caller's inputs (missing files, bad config) exit 2;
// anything else that goes wrong inside the pipeline exits 1.
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct Common {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string seeds;
};

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("waitr");
  logger->set_pattern("[%l] %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("WAITR_LOG")) {
    const auto level = spdlog::level::from_str(env);
    // from_str maps unknown names to off; only honour it when asked for explicitly
    if (level != spdlog::level::off || std::string(env) == "off") spdlog::set_level(level);
    else spdlog::warn("ignoring unknown WAITR_LOG level '{}'", env);
  }
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = text.find(',', pos);
    const std::string item = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    const std::size_t dash = item.find('-');
    try {
      if (dash == std::string::npos) {
        out.push_back(std::stoull(item));
      } else {
        const std::uint64_t lo = std::stoull(item.substr(0, dash));
        const std::uint64_t hi = std::stoull(item.substr(dash + 1));
        if (hi < lo) throw Error(ErrorCode::config, "bad seed range '" + item + "'");
        for (std::uint64_t s = lo; s <= hi; ++s) out.push_back(s);
      }
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::config, "bad seed list '" + text + "'");
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

RunConfig resolve_config(const Common& c) {
  RunConfig cfg;
  if (!c.config_path.empty()) {
    if (!fs::exists(c.config_path)) throw Error(ErrorCode::io, "config file not found: " + c.config_path);
    cfg = load_config(c.config_path);
  }
  for (const std::string& o : c.overrides) apply_override(cfg, o);
  if (!c.seeds.empty()) cfg.seeds = parse_seeds(c.seeds);
  cfg.validate();
  cfg.mission.sync();
  return cfg;
}

EnvSeries require_env(const std::string& path) {
  if (!fs::exists(path)) throw Error(ErrorCode::io, "env file not found: " + path);
  spdlog::info("loading {}", path);
  return load_env(path);
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::io, "cannot create directory " + dir + ": " + ec.message());
}

std::string frame_name(const std::string& dir, const std::string& stem, int frame, const std::string& ext) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%02d", frame);
  return (fs::path(dir) / (stem + "_" + buf + ext)).string();
}

void add_common(CLI::App* app, Common& c) {
  app->add_option("-c,--config", c.config_path, "JSON config file");
  app->add_option("--set", c.overrides, "Override a config key, e.g. --set planner.gamma=0.8")->take_all();
}

std::string events_csv(const std::vector<Event>& events) {
  std::string s = "frame,row,col,magnitude,count\n";
  for (const Event& e : events)
    s += std::to_string(e.frame) + "," + std::to_string(e.cell.row) + "," + std::to_string(e.cell.col) + "," +
         fmt_num(e.magnitude) + "," + std::to_string(e.count) + "\n";
  return s;
}

std::string hazards_csv(const std::vector<Hazard>& hazards) {
  std::string s = "frame,row,col,severity\n";
  for (const Hazard& h : hazards)
    s += std::to_string(h.frame) + "," + std::to_string(h.cell.row) + "," + std::to_string(h.cell.col) + "," +
         fmt_num(h.severity) + "\n";
  return s;
}

void write_frames(const MissionTrace& trace, const MetricsReport& rep, const std::string& dir, bool svg,
                  double radius) {
  for (int f = 0; f < trace.graph.frames(); ++f) {
    const std::vector<int>& pos = rep.positions.at(static_cast<std::size_t>(f));
    write_text(frame_name(dir, "frame", f, ".geojson"), frame_geojson(trace.graph, f, pos));
    if (svg) write_text(frame_name(dir, "frame", f, ".svg"), frame_svg(trace.graph, f, pos, radius));
  }
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Multi-agent spatiotemporal path planning: synthetic scenarios, WAITR and greedy missions"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);

  Common common;
  std::string env_path, out_path, out_dir, planner_name = "waitr";
  std::uint64_t seed = 7;
  std::optional<int> width, height, frames, frame_opt;
  std::optional<double> cell_size;
  bool svg = false;

  auto* synth = app.add_subcommand("synth", "Generate a synthetic environment file");
  add_common(synth, common);
  synth->add_option("--seed", seed, "Generator seed")->capture_default_str();
  synth->add_option("--w", width, "Grid width in cells");
  synth->add_option("--h", height, "Grid height in cells");
  synth->add_option("--frames", frames, "Frame count");
  synth->add_option("--cell-size", cell_size, "Degrees per cell");
  synth->add_option("-o,--out", out_path, "Output grid file")->required();

  auto* extract = app.add_subcommand("extract", "Extract events and hazards to CSV");
  add_common(extract, common);
  extract->add_option("--env", env_path, "Environment grid file")->required();
  extract->add_option("-o,--out-dir", out_dir, "Output directory")->required();

  auto* cluster = app.add_subcommand("cluster", "Rank WPR clusters");
  add_common(cluster, common);
  cluster->add_option("--env", env_path, "Environment grid file")->required();
  cluster->add_option("--frame", frame_opt, "Cluster a single frame instead of all frames");
  cluster->add_option("-o,--out", out_path, "Output clusters CSV")->required();

  auto* graph = app.add_subcommand("graph", "Build the knowledge graph and dump nodes, edges and tables");
  add_common(graph, common);
  graph->add_option("--env", env_path, "Environment grid file")->required();
  graph->add_option("-o,--out-dir", out_dir, "Output directory")->required();

  auto* plan = app.add_subcommand("plan", "Run a planner and write the per-frame plan steps");
  add_common(plan, common);
  plan->add_option("--env", env_path, "Environment grid file")->required();
  plan->add_option("--planner", planner_name, "waitr or greedy")->capture_default_str();
  plan->add_option("-o,--out", out_path, "Output plans CSV")->required();

  auto* run = app.add_subcommand("run", "Run a full mission and write metrics and per-frame GeoJSON");
  add_common(run, common);
  run->add_option("--env", env_path, "Environment grid file")->required();
  run->add_option("--planner", planner_name, "waitr or greedy")->capture_default_str();
  run->add_option("-o,--out-dir", out_dir, "Output directory")->required();
  run->add_flag("--svg", svg, "Also write SVG frames");

  auto* cmp = app.add_subcommand("compare", "Compare WAITR and greedy over seeds");
  add_common(cmp, common);
  cmp->add_option("--env", env_path, "Environment file; without it each seed gets a synthetic environment");
  cmp->add_option("--seeds", common.seeds, "Seed list such as 1-20 or 3,5,8");
  cmp->add_option("-o,--out-dir", out_dir, "Output directory")->required();

  auto* render = app.add_subcommand("render", "Write GeoJSON and SVG frames for a mission");
  add_common(render, common);
  render->add_option("--env", env_path, "Environment grid file")->required();
  render->add_option("--planner", planner_name, "waitr or greedy")->capture_default_str();
  render->add_option("-o,--out-dir", out_dir, "Output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg = resolve_config(common);
    const MissionConfig& mc = cfg.mission;

    if (*synth) {
      GridSpec spec = cfg.grid;
      if (width) spec.width = *width;
      if (height) spec.height = *height;
      if (frames) spec.frames = *frames;
      if (cell_size) spec.cell_size = *cell_size;
      spec.validate();
      spdlog::info("synth seed {} grid {}x{}x{}", seed, spec.width, spec.height, spec.frames);
      write_env(synth_scenario(seed, spec, cfg.synth), out_path);
    } else if (*extract) {
      const EnvSeries env = require_env(env_path);
      ensure_dir(out_dir);
      const auto events = extract_events(env, mc.tau_poi);
      const auto hazards = extract_hazards(env, mc.tau_haz);
      spdlog::info("{} events, {} hazards", events.size(), hazards.size());
      write_text((fs::path(out_dir) / "events.csv").string(), events_csv(events));
      write_text((fs::path(out_dir) / "hazards.csv").string(), hazards_csv(hazards));
    } else if (*cluster) {
      const EnvSeries env = require_env(env_path);
      const auto events = extract_events(env, mc.tau_poi);
      const auto hazards = extract_hazards(env, mc.tau_haz);
      std::optional<int> f;
      if (frame_opt) {
        if (*frame_opt < 1 || *frame_opt >= env.spec.frames)
          throw Error(ErrorCode::out_of_range, "--frame must lie in [1, frames)");
        f = *frame_opt;
      }
      const auto clusters = wpr_cluster(events, hazards, env.spec, mc.wpr, f);
      spdlog::info("{} clusters", clusters.size());
      write_text(out_path, clusters_csv(clusters));
    } else if (*graph) {
      const EnvSeries env = require_env(env_path);
      ensure_dir(out_dir);
      const Scenario scn = prepare_scenario(env, mc);
      MissionTrace trace;
      const MetricsReport rep = run_mission(scn, PlannerKind::waitr, mc, 0, &trace);
      spdlog::info("{} nodes, {} edges, {} pathlets", trace.graph.size(), trace.graph.edges().size(),
                   trace.pathlets.items.size());
      write_text((fs::path(out_dir) / "nodes.csv").string(), nodes_csv(trace.graph));
      write_text((fs::path(out_dir) / "edges.csv").string(), edges_csv(trace.graph));
      write_text((fs::path(out_dir) / "tables.csv").string(), tables_csv(trace.pathlets));
      write_text((fs::path(out_dir) / "activations.csv").string(), activations_csv(rep.activations));
      for (int f = 0; f < trace.graph.frames(); ++f)
        write_text(frame_name(out_dir, "graph", f, ".geojson"), frame_geojson(trace.graph, f));
    } else if (*plan) {
      const EnvSeries env = require_env(env_path);
      const MetricsReport rep = run_mission(env, planner_from_string(planner_name), mc);
      write_text(out_path, plans_csv(rep.steps));
    } else if (*run || *render) {
      const EnvSeries env = require_env(env_path);
      ensure_dir(out_dir);
      const PlannerKind kind = planner_from_string(planner_name);
      const Scenario scn = prepare_scenario(env, mc);
      MissionTrace trace;
      const MetricsReport rep = run_mission(scn, kind, mc, 0, &trace);
      spdlog::info("{}: covered {} of {} events", rep.planner, rep.covered, rep.total_events);
      if (*run) {
        write_text((fs::path(out_dir) / "metrics.csv").string(), metrics_csv(rep));
        write_text((fs::path(out_dir) / "plans.csv").string(), plans_csv(rep.steps));
        write_text((fs::path(out_dir) / "clusters.csv").string(), clusters_csv(scn.clusters));
        write_text((fs::path(out_dir) / "activations.csv").string(), activations_csv(rep.activations));
        std::cout << rep.planner << " covered " << rep.covered << " of " << rep.total_events << " events ("
                  << fmt_percent(rep.covered, rep.total_events) << "%)\n";
      }
      write_frames(trace, rep, out_dir, svg || *render, mc.radius);
    } else if (*cmp) {
      ensure_dir(out_dir);
      ComparisonTable table;
      if (!env_path.empty()) {
        const EnvSeries env = require_env(env_path);
        if (common.seeds.empty()) cfg.seeds = {0};
        table = compare(env, mc, cfg.seeds);
      } else {
        table = compare_suite(cfg.grid, cfg.synth, mc, cfg.seeds);
      }
      std::string metrics = metrics_header();
      for (const SeedComparison& r : table.rows) {
        spdlog::debug("seed {}: waitr {} greedy {}", r.seed, r.waitr.covered, r.greedy.covered);
        metrics += metrics_rows(r.waitr) + metrics_rows(r.greedy);
      }
      write_text((fs::path(out_dir) / "metrics.csv").string(), metrics);
      write_text((fs::path(out_dir) / "summary.csv").string(), summary_csv(table));
      std::cout << "waitr " << table.waitr_total << " vs greedy " << table.greedy_total << " covered; waitr >= greedy on "
                << table.waitr_at_least_greedy() << " of " << table.rows.size() << " seeds\n";
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    const bool usage = e.code() == ErrorCode::io || e.code() == ErrorCode::config;
    return usage ? kExitUsage : kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return 0;
}
