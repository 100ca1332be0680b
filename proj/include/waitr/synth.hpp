#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "waitr/env.hpp"
#include "waitr/grid_io.hpp"

namespace waitr {

// Knobs for the synthetic ocean. Lengths are in cells, speeds of features in
// cells per frame, current magnitudes in m/s.
struct SynthParams {
  double background = 20.0;

  int blobs = 10;
  double blob_amp_min = 2.0;
  double blob_amp_max = 6.0;
  double blob_sigma_min = 1.2;
  double blob_sigma_max = 2.5;
  double blob_drift_max = 1.5;
  double blob_halfwidth_min = 1.5;  // frames from peak to vanish
  double blob_halfwidth_max = 4.0;

  int swirls = 3;
  double swirl_speed_min = 0.15;
  double swirl_speed_max = 0.4;
  double swirl_sigma_min = 2.0;
  double swirl_sigma_max = 4.0;
  double swirl_drift_max = 0.5;

  int patches = 2;
  double patch_speed_min = 0.7;
  double patch_speed_max = 1.2;
  double patch_sigma_min = 1.0;
  double patch_sigma_max = 2.0;
  double patch_drift_max = 1.0;

  friend bool operator==(const SynthParams&, const SynthParams&) = default;
};

namespace detail {

// std:: distributions are implementation-defined; this keeps generated files
// identical across standard libraries.
class SplitRng {
 public:
  explicit SplitRng(std::uint64_t seed) : engine_(seed) {}

  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

 private:
  std::mt19937_64 engine_;
};

struct Mover {
  double row0, col0, drow, dcol, sigma;

  double row_at(int t) const { return row0 + drow * t; }
  double col_at(int t) const { return col0 + dcol * t; }
};

inline Mover random_mover(SplitRng& rng, const GridSpec& g, double sigma_lo,
                          double sigma_hi, double drift_max) {
  Mover m{};
  m.row0 = rng.uniform(0.0, g.height - 1.0);
  m.col0 = rng.uniform(0.0, g.width - 1.0);
  const double speed = rng.uniform(0.0, drift_max);
  const double heading = rng.uniform(0.0, 2.0 * std::numbers::pi);
  m.drow = speed * std::sin(heading);
  m.dcol = speed * std::cos(heading);
  m.sigma = rng.uniform(sigma_lo, sigma_hi);
  return m;
}

}  // namespace detail

// Temperature = background + drifting Gaussian blobs that rise and fade.
// Currents = divergence-free swirls plus drifting fast jets.
inline EnvSeries synth_scenario(std::uint64_t seed, const GridSpec& spec,
                                const SynthParams& params = {}) {
  spec.validate();
  detail::SplitRng rng(seed);

  struct Blob {
    detail::Mover m;
    double amp, peak, halfwidth;
  };
  struct Swirl {
    detail::Mover m;
    double strength;
  };
  struct Patch {
    detail::Mover m;
    double speed, heading;
  };

  std::vector<Blob> blobs;
  for (int i = 0; i < params.blobs; ++i) {
    Blob b{};
    b.m = detail::random_mover(rng, spec, params.blob_sigma_min, params.blob_sigma_max,
                               params.blob_drift_max);
    b.amp = rng.uniform(params.blob_amp_min, params.blob_amp_max);
    if (rng.uniform01() < 0.3) b.amp = -b.amp;
    b.peak = rng.uniform(0.0, spec.frames - 1.0);
    b.halfwidth = rng.uniform(params.blob_halfwidth_min, params.blob_halfwidth_max);
    blobs.push_back(b);
  }
  std::vector<Swirl> swirls;
  for (int i = 0; i < params.swirls; ++i) {
    Swirl s{};
    s.m = detail::random_mover(rng, spec, params.swirl_sigma_min, params.swirl_sigma_max,
                               params.swirl_drift_max);
    s.strength = rng.uniform(params.swirl_speed_min, params.swirl_speed_max);
    if (rng.uniform01() < 0.5) s.strength = -s.strength;
    swirls.push_back(s);
  }
  std::vector<Patch> patches;
  for (int i = 0; i < params.patches; ++i) {
    Patch p{};
    p.m = detail::random_mover(rng, spec, params.patch_sigma_min, params.patch_sigma_max,
                               params.patch_drift_max);
    p.speed = rng.uniform(params.patch_speed_min, params.patch_speed_max);
    p.heading = rng.uniform(0.0, 2.0 * std::numbers::pi);
    patches.push_back(p);
  }

  EnvSeries env;
  env.spec = spec;
  for (int t = 0; t < spec.frames; ++t) {
    Field temp(spec.height, spec.width, params.background);
    Field u(spec.height, spec.width);
    Field v(spec.height, spec.width);
    for (int r = 0; r < spec.height; ++r) {
      for (int c = 0; c < spec.width; ++c) {
        double tv = params.background;
        for (const Blob& b : blobs) {
          const double envl = std::max(0.0, 1.0 - std::abs(t - b.peak) / b.halfwidth);
          if (envl == 0.0) continue;
          const double dr = r - b.m.row_at(t), dc = c - b.m.col_at(t);
          tv += b.amp * envl * std::exp(-(dr * dr + dc * dc) / (2.0 * b.m.sigma * b.m.sigma));
        }
        double uu = 0.0, vv = 0.0;
        for (const Swirl& s : swirls) {
          // stream function psi = A exp(-d^2 / 2 sigma^2); peak speed at d = sigma
          const double sig2 = s.m.sigma * s.m.sigma;
          const double a = s.strength * s.m.sigma * std::exp(0.5);
          const double dy = r - s.m.row_at(t), dx = c - s.m.col_at(t);
          const double e = a * std::exp(-(dx * dx + dy * dy) / (2.0 * sig2)) / sig2;
          uu += e * dy;   // -dpsi/dy
          vv += -e * dx;  // dpsi/dx
        }
        for (const Patch& p : patches) {
          const double dy = r - p.m.row_at(t), dx = c - p.m.col_at(t);
          const double e = p.speed *
                           std::exp(-(dx * dx + dy * dy) / (2.0 * p.m.sigma * p.m.sigma));
          uu += e * std::cos(p.heading);
          vv += e * std::sin(p.heading);
        }
        temp(r, c) = quantize6(tv);
        u(r, c) = quantize6(uu);
        v(r, c) = quantize6(vv);
      }
    }
    env.temperature.push_back(std::move(temp));
    env.current_u.push_back(std::move(u));
    env.current_v.push_back(std::move(v));
  }
  return env;
}

}  // namespace waitr
