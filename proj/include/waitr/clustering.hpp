#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <unordered_map>
#include <vector>

#include "waitr/env.hpp"
#include "waitr/error.hpp"
#include "waitr/geometry.hpp"

namespace waitr {

struct WPRConfig {
  double radius = 0.5;  // degrees
  double alpha = 1.0;
  double beta = 1.0;
  double lambda = 0.1;  // reward units per degree of travel

  void validate() const {
    if (!(radius > 0.0)) throw Error(ErrorCode::config, "wpr.radius must be positive");
    if (alpha < 0.0 || beta < 0.0 || lambda < 0.0)
      throw Error(ErrorCode::config, "wpr coefficients must be nonnegative");
  }
};

struct WeightedPOI {
  Cell cell;
  double V = 0.0;  // aggregated event count
  double R = 0.0;  // normalized risk in [0, 1]
  double C = 1.0;  // confidence in [0, 1]
  double W = 0.0;
};

struct Cluster {
  Cell centroid;
  std::vector<WeightedPOI> members;
  double score = 0.0;
  int covered_count = 0;
};

using ConfidenceMap = std::unordered_map<Cell, double, CellHash>;

// W = alpha * C * V - beta * R
inline double weight_poi(double value, double risk, double confidence, const WPRConfig& cfg) {
  if (!(confidence >= 0.0 && confidence <= 1.0))
    throw Error(ErrorCode::invalid_argument, "confidence must lie in [0, 1]");
  if (!(risk >= 0.0)) throw Error(ErrorCode::invalid_argument, "risk must be nonnegative");
  return cfg.alpha * confidence * value - cfg.beta * risk;
}

// Min-max normalization to [0, 1]; a constant vector maps to all zeros.
inline std::vector<double> minmax_normalize(const std::vector<double>& raw) {
  std::vector<double> out(raw.size(), 0.0);
  if (raw.empty()) return out;
  const auto [lo, hi] = std::minmax_element(raw.begin(), raw.end());
  const double span = *hi - *lo;
  if (!(span > 0.0)) return out;
  for (std::size_t i = 0; i < raw.size(); ++i) out[i] = (raw[i] - *lo) / span;
  return out;
}

// Per-cell POIs for one frame (or all frames when `frame` is empty), with
// risk taken as the strongest hazard within the radius.
inline std::vector<WeightedPOI> weighted_pois(const std::vector<Event>& events,
                                              const std::vector<Hazard>& hazards,
                                              const GridSpec& spec, const WPRConfig& cfg,
                                              std::optional<int> frame = std::nullopt,
                                              const ConfidenceMap& confidence = {}) {
  Field counts(spec.height, spec.width);
  for (const Event& e : events)
    if (!frame || e.frame == *frame) counts(e.cell.row, e.cell.col) += e.count;

  Field severity(spec.height, spec.width);
  for (const Hazard& h : hazards)
    if (!frame || h.frame == *frame)
      severity(h.cell.row, h.cell.col) = std::max(severity(h.cell.row, h.cell.col), h.severity);

  std::vector<WeightedPOI> pois;
  std::vector<double> raw_risk;
  const int reach = static_cast<int>(std::ceil(cfg.radius / spec.cell_size));
  for (int r = 0; r < spec.height; ++r)
    for (int c = 0; c < spec.width; ++c) {
      if (counts(r, c) <= 0.0) continue;
      double risk = 0.0;
      for (int rr = std::max(0, r - reach); rr <= std::min(spec.height - 1, r + reach); ++rr)
        for (int cc = std::max(0, c - reach); cc <= std::min(spec.width - 1, c + reach); ++cc)
          if (within_radius({r, c}, {rr, cc}, cfg.radius, spec.cell_size))
            risk = std::max(risk, severity(rr, cc));
      WeightedPOI p;
      p.cell = {r, c};
      p.V = counts(r, c);
      auto it = confidence.find(p.cell);
      p.C = it == confidence.end() ? 1.0 : it->second;
      pois.push_back(p);
      raw_risk.push_back(risk);
    }
  const auto norm = minmax_normalize(raw_risk);
  for (std::size_t i = 0; i < pois.size(); ++i) {
    pois[i].R = norm[i];
    pois[i].W = weight_poi(pois[i].V, pois[i].R, pois[i].C, cfg);
  }
  return pois;
}

namespace detail {

inline bool better_candidate(double score, Cell cell, double best_score, Cell best_cell) {
  if (score != best_score) return score > best_score;
  return cell < best_cell;
}

// Greedy radius clustering with suppression of already-covered POIs.
inline std::vector<Cluster> suppress_greedy(const std::vector<WeightedPOI>& pois,
                                            const std::vector<Cell>& candidates,
                                            const GridSpec& spec, double radius) {
  std::vector<std::vector<std::size_t>> reach(candidates.size());
  for (std::size_t k = 0; k < candidates.size(); ++k)
    for (std::size_t i = 0; i < pois.size(); ++i)
      if (within_radius(candidates[k], pois[i].cell, radius, spec.cell_size))
        reach[k].push_back(i);

  std::vector<bool> alive(pois.size(), true);
  std::vector<bool> used(candidates.size(), false);
  std::size_t remaining = pois.size();
  std::vector<Cluster> out;
  while (remaining > 0) {
    std::optional<std::size_t> best;
    double best_score = 0.0;
    for (std::size_t k = 0; k < candidates.size(); ++k) {
      if (used[k]) continue;
      double score = 0.0;
      bool any = false;
      for (std::size_t i : reach[k])
        if (alive[i]) {
          score += pois[i].W;
          any = true;
        }
      if (!any) continue;
      if (!best || better_candidate(score, candidates[k], best_score, candidates[*best])) {
        best = k;
        best_score = score;
      }
    }
    if (!best) break;
    Cluster cl;
    cl.centroid = candidates[*best];
    for (std::size_t i : reach[*best])
      if (alive[i]) {
        cl.members.push_back(pois[i]);
        cl.score += pois[i].W;
        cl.covered_count += static_cast<int>(pois[i].V);
        alive[i] = false;
        --remaining;
      }
    used[*best] = true;
    out.push_back(std::move(cl));
  }
  return out;
}

}  // namespace detail

// Ranked, event-disjoint clusters. Candidate centroids are the event-bearing
// cells; ties go to (score desc, row asc, col asc).
inline std::vector<Cluster> wpr_cluster(const std::vector<Event>& events,
                                        const std::vector<Hazard>& hazards,
                                        const GridSpec& spec, const WPRConfig& cfg,
                                        std::optional<int> frame = std::nullopt,
                                        const ConfidenceMap& confidence = {}) {
  cfg.validate();
  const auto pois = weighted_pois(events, hazards, spec, cfg, frame, confidence);
  std::vector<Cell> candidates;
  candidates.reserve(pois.size());
  for (const WeightedPOI& p : pois) candidates.push_back(p.cell);
  return detail::suppress_greedy(pois, candidates, spec, cfg.radius);
}

// Cumulative covered-event counts of the top-k clusters for each k.
inline std::vector<int> top_k_coverage(const std::vector<Cluster>& clusters,
                                       const std::vector<int>& ks) {
  std::vector<int> out;
  for (int k : ks) {
    int sum = 0;
    for (int i = 0; i < k && i < static_cast<int>(clusters.size()); ++i)
      sum += clusters[i].covered_count;
    out.push_back(sum);
  }
  return out;
}

// Total score minus lambda times the travel along the visiting order. Travel
// legs are summed in sorted order so a route and its reverse score identically.
inline double prep_objective(const std::vector<Cluster>& order, double lambda, double cell_size) {
  std::vector<double> scores, legs;
  for (std::size_t i = 0; i < order.size(); ++i) {
    scores.push_back(order[i].score);
    if (i > 0) legs.push_back(distance_deg(order[i - 1].centroid, order[i].centroid, cell_size));
  }
  std::sort(scores.begin(), scores.end());
  std::sort(legs.begin(), legs.end());
  const double reward = std::accumulate(scores.begin(), scores.end(), 0.0);
  const double travel = std::accumulate(legs.begin(), legs.end(), 0.0);
  return reward - lambda * travel;
}

inline constexpr std::size_t kPrepExactLimit = 8;

// Chooses k clusters and a visiting order maximizing prep_objective. Exact for
// up to kPrepExactLimit candidates, greedy best-insertion beyond that.
inline std::vector<Cluster> prep_select(const std::vector<Cluster>& clusters, int k,
                                        double lambda, double cell_size) {
  if (k < 1) throw Error(ErrorCode::invalid_argument, "prep_select needs k >= 1");
  const std::size_t n = clusters.size();
  const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(k), n);
  if (take == 0) return {};

  auto centroids_less = [&](const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    return std::lexicographical_compare(
        a.begin(), a.end(), b.begin(), b.end(),
        [&](std::size_t x, std::size_t y) { return clusters[x].centroid < clusters[y].centroid; });
  };
  auto materialize = [&](const std::vector<std::size_t>& idx) {
    std::vector<Cluster> out;
    for (std::size_t i : idx) out.push_back(clusters[i]);
    return out;
  };

  if (n <= kPrepExactLimit) {
    std::vector<std::size_t> best;
    double best_obj = -std::numeric_limits<double>::infinity();
    std::vector<bool> mask(n, false);
    std::fill(mask.begin(), mask.begin() + static_cast<std::ptrdiff_t>(take), true);
    do {
      std::vector<std::size_t> perm;
      for (std::size_t i = 0; i < n; ++i)
        if (mask[i]) perm.push_back(i);
      do {
        const double obj = prep_objective(materialize(perm), lambda, cell_size);
        if (best.empty() || obj > best_obj || (obj == best_obj && centroids_less(perm, best))) {
          best = perm;
          best_obj = obj;
        }
      } while (std::next_permutation(perm.begin(), perm.end()));
    } while (std::prev_permutation(mask.begin(), mask.end()));
    return materialize(best);
  }

  std::vector<std::size_t> order;
  std::vector<bool> chosen(n, false);
  auto dist = [&](std::size_t a, std::size_t b) {
    return distance_deg(clusters[a].centroid, clusters[b].centroid, cell_size);
  };
  while (order.size() < take) {
    double best_gain = -std::numeric_limits<double>::infinity();
    std::size_t best_c = n, best_pos = 0;
    for (std::size_t c = 0; c < n; ++c) {
      if (chosen[c]) continue;
      for (std::size_t pos = 0; pos <= order.size(); ++pos) {
        double extra = 0.0;
        if (pos > 0) extra += dist(order[pos - 1], c);
        if (pos < order.size()) extra += dist(c, order[pos]);
        if (pos > 0 && pos < order.size()) extra -= dist(order[pos - 1], order[pos]);
        const double gain = clusters[c].score - lambda * extra;
        if (gain > best_gain) {
          best_gain = gain;
          best_c = c;
          best_pos = pos;
        }
      }
    }
    chosen[best_c] = true;
    order.insert(order.begin() + static_cast<std::ptrdiff_t>(best_pos), best_c);
  }
  return materialize(order);
}

}  // namespace waitr
