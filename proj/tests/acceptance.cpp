#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "support.hpp"

using namespace waitr;

namespace {

using Clock = std::chrono::steady_clock;

constexpr int kTinyInstances = 60;
constexpr double kOracleBudgetSeconds = 10.0;
constexpr int kPathletGraphs = 20;
constexpr int kRouteQueries = 100;
constexpr double kSeedShareRequired = 0.70;
constexpr double kComparativeBudgetSeconds = 120.0;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = true;
  std::string detail;
};

Outcome oracle_optimality() {
  std::mt19937_64 rng(20240601);
  const auto t0 = Clock::now();
  int mismatches = 0;
  for (int i = 0; i < kTinyInstances; ++i) {
    support::TinyInstance inst = support::random_tiny(rng);
    AgentState a;
    a.node = inst.start;
    const auto plans = plan_waitr(inst.g, inst.ps, {a}, inst.layers, inst.cfg, 0);
    if (plans[0].projected_score != support::exhaustive_best(inst)) ++mismatches;
  }
  const double secs = seconds_since(t0);
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%d instances, %d mismatches, %.2f s", kTinyInstances, mismatches, secs);
  return {mismatches == 0 && secs < kOracleBudgetSeconds, buf};
}

Outcome pathlet_equivalence() {
  std::mt19937_64 rng(20);
  std::uniform_int_distribution<int> size(20, 200), block(3, 10);
  long entries = 0, bad_entries = 0;
  int bad_routes = 0, queries = 0;
  for (int trial = 0; trial < kPathletGraphs; ++trial) {
    KGraph g = support::random_graph(rng, size(rng));
    Pathlets ps = partition(g, block(rng));
    refresh_tables(ps, g, 0);
    for (const Pathlet& p : ps.items) {
      const PathletTable& t = p.tables.at(0);
      for (int s = 0; s < t.n; ++s) {
        const auto oracle = support::bellman_ford(g, 0, p.node_ids, p.node_ids[s]);
        for (int d = 0; d < t.n; ++d, ++entries)
          if (t.cost_at(s, d) != oracle.at(p.node_ids[d])) ++bad_entries;
      }
    }
    std::uniform_int_distribution<int> node(0, g.size() - 1);
    for (int q = 0; q < kRouteQueries / kPathletGraphs; ++q, ++queries) {
      const int a = node(rng), b = node(rng);
      const double full = support::bellman_ford(g, 0, support::all_ids(g), a).at(b);
      const Route r = route(ps, g, a, b, 0);
      if (r.found ? r.cost < full : !std::isinf(full)) ++bad_routes;
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%ld table entries, %ld mismatches; %d route queries, %d below oracle", entries,
                bad_entries, queries, bad_routes);
  return {bad_entries == 0 && bad_routes == 0, buf};
}

Outcome ecr_arithmetic() {
  const double a = 100.0 * ecr(2811, 10378);
  const double b = 100.0 * ecr(2445, 10378);
  const bool ok = std::round(a * 10) / 10 == 27.1 && std::round(b * 10) / 10 == std::round(23.56 * 10) / 10;
  char buf[96];
  std::snprintf(buf, sizeof(buf), "2811/10378 = %.4f%%, 2445/10378 = %.4f%%", a, b);
  return {ok, buf};
}

Outcome comparative_ordering() {
  const auto t0 = Clock::now();
  const ComparisonTable t = compare_suite(support::suite_spec(), {}, MissionConfig{}, support::suite_seeds());
  const double secs = seconds_since(t0);
  const int n = static_cast<int>(t.rows.size());
  const bool share = t.waitr_at_least_greedy() >= std::ceil(kSeedShareRequired * n);
  char buf[200];
  std::snprintf(buf, sizeof(buf), "waitr >= greedy on %d/%d seeds (w%d l%d t%d), totals %d vs %d of %d, %.1f s",
                t.waitr_at_least_greedy(), n, t.waitr_wins, t.greedy_wins, t.ties, t.waitr_total, t.greedy_total,
                t.total_events, secs);
  return {share && t.waitr_total > t.greedy_total && secs < kComparativeBudgetSeconds, buf};
}

Outcome greedy_fidelity() {
  const PlannerConfig cfg;
  auto step = [&](const support::GreedyFixture& fx) { return plan_greedy(fx.g, fx.ps, fx.agents, cfg, 0)[0].waypoints; };
  int ok = 0;
  // highest count wins
  ok += step(support::greedy_fixture({5, 5}, {{{5, 8}, 3}, {{2, 5}, 5}}))[1] == 2;
  // equal counts: nearest wins
  ok += step(support::greedy_fixture({5, 5}, {{{5, 7}, 4}, {{5, 4}, 4}}))[1] == 2;
  // equal count and distance: lowest id
  ok += step(support::greedy_fixture({5, 5}, {{{5, 7}, 4}, {{5, 3}, 4}}))[1] == 1;
  // nothing with events in range: stay
  ok += step(support::greedy_fixture({0, 0}, {{{0, 9}, 7}, {{3, 3}, 0}})) == std::vector<int>{0, 0};
  return {ok == 4, std::to_string(ok) + "/4 scripted rules"};
}

Outcome property_suites() {
  int failed = 0;
  std::string which;
  auto check = [&](bool ok, const char* name) {
    if (!ok) {
      ++failed;
      which += std::string(which.empty() ? "" : ", ") + name;
    }
  };
  const EnvSeries env = synth_scenario(7, support::suite_spec());
  {
    bool ok = true;
    auto lo = extract_events(env, 0.5), hi = extract_events(env, 1.5);
    for (const Event& e : hi) ok &= std::find(lo.begin(), lo.end(), e) != lo.end();
    auto hlo = extract_hazards(env, 0.3), hhi = extract_hazards(env, 0.8);
    for (const Hazard& h : hhi) ok &= std::find(hlo.begin(), hlo.end(), h) != hlo.end();
    const Scenario scn = prepare_scenario(env, MissionConfig{});
    for (int t = 1; t < 5; ++t) {
      TEDConfig a, b;
      a.delta = 0.5;
      b.delta = 2.0;
      const auto al = activate(scn.density, t, a), bl = activate(scn.density, t, b);
      for (int v : bl) ok &= std::find(al.begin(), al.end(), v) != al.end();
    }
    check(ok, "threshold monotonicity");
  }
  {
    const WPRConfig w;
    bool ok = weight_poi(5, 0.2, 0.8, w) <= weight_poi(6, 0.2, 0.8, w) &&
              weight_poi(5, 0.2, 0.8, w) >= weight_poi(5, 0.4, 0.8, w);
    WPRConfig nb;
    nb.beta = 0.0;
    auto ev = extract_events(env, 1.0), scaled = ev;
    for (Event& e : scaled) e.count *= 4;
    const auto a = wpr_cluster(ev, {}, env.spec, nb), b = wpr_cluster(scaled, {}, env.spec, nb);
    ok &= !a.empty() && a.size() == b.size() && a[0].centroid == b[0].centroid;
    check(ok, "weight monotonicity / argmax invariance");
  }
  {
    const Scenario scn = prepare_scenario(env, MissionConfig{});
    bool ok = true;
    for (PlannerKind k : {PlannerKind::waitr, PlannerKind::greedy}) {
      const MetricsReport r = run_mission(scn, k, MissionConfig{});
      std::vector<int> nf;
      for (const FrameMetrics& f : r.per_frame) nf.push_back(f.newly_covered);
      ok &= nf == support::replay_coverage(scn, r, 0.5) && r.covered <= r.total_events;
      ok &= r == run_mission(scn, k, MissionConfig{});
    }
    check(ok, "coverage de-duplication / determinism");
  }
  {
    const auto p = support::prepared(7);
    bool ok = true;
    for (int f = 0; f < p.g.frames(); ++f)
      for (std::size_t e = 0; e < p.g.edges().size(); ++e) ok &= p.g.edge_weight(static_cast<int>(e), f) >= 0.0;
    check(ok, "edge-weight nonnegativity");
  }
  {
    KGraph g({4, 4, 0.1, 0, 0, 2, 1}, GraphKnobs{});
    g.add_node(NodeKind::waypoint, {0, 0});
    Pathlets ps = partition(g, 10);
    refresh_tables(ps, g, 0);
    TransitionModel tm(g, ps, 0, 1);
    PlannerConfig cfg;
    cfg.T = 2;
    cfg.gamma = 0.9;
    check(score_plan({0, 0, 0}, tm, RewardLayers(3, {1.0}), cfg) == 2.71, "geometric series 2.71");
  }
  return {failed == 0, failed == 0 ? "all property checks hold" : "failed: " + which};
}

Outcome hazard_avoidance() {
  std::vector<int> exposure;
  for (double h : {0.0, 1.0, 10.0, kInfinity}) {
    const auto hs = support::hazard_two_route(h);
    const MetricsReport r = run_mission(hs.scn, PlannerKind::waitr, hs.cfg);
    int n = 0;
    for (const FrameMetrics& f : r.per_frame) n += f.hazard_exposure_steps;
    exposure.push_back(n);
  }
  bool ok = exposure.back() == 0;
  for (std::size_t i = 1; i < exposure.size(); ++i) ok &= exposure[i] <= exposure[i - 1];
  char buf[96];
  std::snprintf(buf, sizeof(buf), "exposure at h = 0, 1, 10, inf: %d %d %d %d", exposure[0], exposure[1],
                exposure[2], exposure[3]);
  return {ok, buf};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"oracle optimality", oracle_optimality},       {"pathlet table equivalence", pathlet_equivalence},
      {"ECR arithmetic", ecr_arithmetic},             {"comparative ordering", comparative_ordering},
      {"greedy fidelity", greedy_fidelity},           {"property suites", property_suites},
      {"hazard avoidance", hazard_avoidance},
  };
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s  %-26s %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
  }
  return failures == 0 ? 0 : 1;
}
