#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "waitr/error.hpp"
#include "waitr/geometry.hpp"

namespace waitr {

struct GridSpec {
  int width = 0;
  int height = 0;
  double cell_size = 0.0;  // degrees per cell
  double origin_lat = 0.0;
  double origin_lon = 0.0;
  int frames = 0;
  double frame_interval = 1.0;

  bool contains(Cell c) const {
    return c.row >= 0 && c.row < height && c.col >= 0 && c.col < width;
  }

  void validate() const {
    if (width < 1 || height < 1)
      throw Error(ErrorCode::invalid_argument, "grid must be at least 1x1");
    if (!(cell_size > 0.0) || !std::isfinite(cell_size))
      throw Error(ErrorCode::invalid_argument, "cell_size must be positive");
    if (frames < 2)
      throw Error(ErrorCode::invalid_argument,
                  "at least two frames are needed for differentials");
    if (!(frame_interval > 0.0))
      throw Error(ErrorCode::invalid_argument, "frame_interval must be positive");
  }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

// Row-major height x width scalar field.
class Field {
 public:
  Field() = default;
  Field(int height, int width, double fill = 0.0)
      : height_(height), width_(width),
        data_(static_cast<std::size_t>(height) * width, fill) {}

  int height() const { return height_; }
  int width() const { return width_; }

  double& operator()(int row, int col) {
    return data_[static_cast<std::size_t>(row) * width_ + col];
  }
  double operator()(int row, int col) const {
    return data_[static_cast<std::size_t>(row) * width_ + col];
  }
  double operator()(Cell c) const { return (*this)(c.row, c.col); }

  const std::vector<double>& values() const { return data_; }
  std::vector<double>& values() { return data_; }

  friend bool operator==(const Field&, const Field&) = default;

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<double> data_;
};

struct EnvSeries {
  GridSpec spec;
  std::vector<Field> temperature;
  std::vector<Field> current_u;
  std::vector<Field> current_v;

  void validate() const {
    spec.validate();
    auto check = [&](const std::vector<Field>& fields, const char* name) {
      if (static_cast<int>(fields.size()) != spec.frames)
        throw Error(ErrorCode::shape_mismatch,
                    std::string(name) + ": expected " +
                        std::to_string(spec.frames) + " frames, got " +
                        std::to_string(fields.size()));
      for (const Field& f : fields) {
        if (f.height() != spec.height || f.width() != spec.width)
          throw Error(ErrorCode::shape_mismatch,
                      std::string(name) + ": frame shape does not match grid");
        for (double v : f.values())
          if (!std::isfinite(v))
            throw Error(ErrorCode::non_finite,
                        std::string(name) + ": non-finite value");
      }
    };
    check(temperature, "TEMP");
    check(current_u, "CUR_U");
    check(current_v, "CUR_V");
  }

  friend bool operator==(const EnvSeries&, const EnvSeries&) = default;
};

struct Event {
  Cell cell;
  int frame = 0;
  double magnitude = 0.0;  // |dT| in degrees C
  int count = 1;

  friend bool operator==(const Event&, const Event&) = default;
};

struct Hazard {
  Cell cell;
  int frame = 0;
  double severity = 0.0;  // current speed in m/s

  friend bool operator==(const Hazard&, const Hazard&) = default;
};

// Temperature-differential events. Output is ordered by (frame, row, col).
inline std::vector<Event> extract_events(const EnvSeries& env, double tau_poi) {
  if (!(tau_poi > 0.0))
    throw Error(ErrorCode::invalid_argument, "tau_poi must be positive");
  std::vector<Event> out;
  const GridSpec& g = env.spec;
  for (int t = 1; t < g.frames; ++t) {
    const Field& prev = env.temperature[t - 1];
    const Field& cur = env.temperature[t];
    for (int r = 0; r < g.height; ++r)
      for (int c = 0; c < g.width; ++c) {
        const double mag = std::abs(cur(r, c) - prev(r, c));
        if (mag >= tau_poi) out.push_back(Event{{r, c}, t, mag, 1});
      }
  }
  return out;
}

inline double current_speed(double u, double v) { return std::sqrt(u * u + v * v); }

// Strong-current cells, ordered by (frame, row, col).
inline std::vector<Hazard> extract_hazards(const EnvSeries& env, double tau_haz) {
  if (!(tau_haz > 0.0))
    throw Error(ErrorCode::invalid_argument, "tau_haz must be positive");
  std::vector<Hazard> out;
  const GridSpec& g = env.spec;
  for (int t = 0; t < g.frames; ++t)
    for (int r = 0; r < g.height; ++r)
      for (int c = 0; c < g.width; ++c) {
        const double s = current_speed(env.current_u[t](r, c), env.current_v[t](r, c));
        if (s >= tau_haz) out.push_back(Hazard{{r, c}, t, s});
      }
  return out;
}

template <typename Item>
std::vector<Item> at_frame(const std::vector<Item>& items, int frame) {
  std::vector<Item> out;
  for (const Item& it : items)
    if (it.frame == frame) out.push_back(it);
  return out;
}

}  // namespace waitr
