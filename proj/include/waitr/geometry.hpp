#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <functional>

namespace waitr {

struct Cell {
  int row = 0;
  int col = 0;

  friend auto operator<=>(const Cell&, const Cell&) = default;
};

// Slack for radius tests so that cells sitting exactly on the circle count
// as inside regardless of how the radius was written down.
inline constexpr double kRadiusEps = 1e-9;

// Euclidean distance between cell centers in degrees.
inline double distance_deg(Cell a, Cell b, double cell_size) {
  return cell_size * std::hypot(static_cast<double>(a.row - b.row),
                                static_cast<double>(a.col - b.col));
}

inline bool within_radius(Cell a, Cell b, double radius, double cell_size) {
  return distance_deg(a, b, cell_size) <= radius + kRadiusEps;
}

// Distance in degrees from cell center p to the segment [a, b].
inline double point_segment_distance_deg(Cell p, Cell a, Cell b,
                                         double cell_size) {
  const double ax = a.col, ay = a.row;
  const double dx = b.col - ax, dy = b.row - ay;
  const double px = p.col - ax, py = p.row - ay;
  const double len2 = dx * dx + dy * dy;
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp((px * dx + py * dy) / len2, 0.0, 1.0);
  return cell_size * std::hypot(px - t * dx, py - t * dy);
}

struct CellHash {
  std::size_t operator()(Cell c) const noexcept {
    return std::hash<long long>{}((static_cast<long long>(c.row) << 32) ^
                                  static_cast<unsigned>(c.col));
  }
};

}  // namespace waitr
