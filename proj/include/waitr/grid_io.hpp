#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "waitr/env.hpp"
#include "waitr/error.hpp"

// Plain-text grid format:
//
//   GRID <w> <h> <frames> <cell_size> <origin_lat> <origin_lon>
//   FIELD <TEMP|CUR_U|CUR_V> <frame>
//   <h rows of w space-separated decimals>
//   ...
//
// Every decimal is written with exactly six fractional digits. Fields are
// emitted in the order TEMP, CUR_U, CUR_V and frames ascending.

namespace waitr {

inline constexpr std::array<std::string_view, 3> kFieldNames = {"TEMP", "CUR_U", "CUR_V"};

namespace detail {

inline void append_fixed6(std::string& out, double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, 6);
  out.append(buf, res.ptr);
}

inline double parse_double(std::string_view tok, int line_no) {
  double v = 0.0;
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
    throw Error(ErrorCode::malformed_header,
                "line " + std::to_string(line_no) + ": bad number '" +
                    std::string(tok) + "'");
  return v;
}

inline int parse_int(std::string_view tok, int line_no) {
  int v = 0;
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
    throw Error(ErrorCode::malformed_header,
                "line " + std::to_string(line_no) + ": bad integer '" +
                    std::string(tok) + "'");
  return v;
}

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> toks;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) toks.push_back(line.substr(i, j - i));
    i = j;
  }
  return toks;
}

inline std::vector<Field>& field_slot(EnvSeries& env, std::size_t which) {
  if (which == 0) return env.temperature;
  if (which == 1) return env.current_u;
  return env.current_v;
}

inline const std::vector<Field>& field_slot(const EnvSeries& env, std::size_t which) {
  if (which == 0) return env.temperature;
  if (which == 1) return env.current_u;
  return env.current_v;
}

}  // namespace detail

// Rounds to the six-decimal grid the file format can represent exactly.
inline double quantize6(double v) {
  const double q = std::round(v * 1e6) / 1e6;
  return q == 0.0 ? 0.0 : q;
}

inline std::string format_env(const EnvSeries& env) {
  env.validate();
  const GridSpec& g = env.spec;
  std::string out;
  out.reserve(static_cast<std::size_t>(g.width) * g.height * g.frames * 3 * 11 + 256);
  out += "GRID " + std::to_string(g.width) + ' ' + std::to_string(g.height) + ' ' +
         std::to_string(g.frames) + ' ';
  detail::append_fixed6(out, g.cell_size);
  out += ' ';
  detail::append_fixed6(out, g.origin_lat);
  out += ' ';
  detail::append_fixed6(out, g.origin_lon);
  out += '\n';
  for (std::size_t k = 0; k < kFieldNames.size(); ++k) {
    const auto& fields = detail::field_slot(env, k);
    for (int t = 0; t < g.frames; ++t) {
      out += "FIELD ";
      out += kFieldNames[k];
      out += ' ' + std::to_string(t) + '\n';
      for (int r = 0; r < g.height; ++r) {
        for (int c = 0; c < g.width; ++c) {
          if (c) out += ' ';
          detail::append_fixed6(out, fields[t](r, c));
        }
        out += '\n';
      }
    }
  }
  return out;
}

inline void write_env(const EnvSeries& env, const std::string& path) {
  const std::string text = format_env(env);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::io, "cannot open " + path + " for writing");
  os.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!os) throw Error(ErrorCode::io, "write failed: " + path);
}

inline EnvSeries parse_env(std::string_view text) {
  std::vector<std::string_view> lines;
  {
    std::size_t start = 0;
    while (start < text.size()) {
      std::size_t end = text.find('\n', start);
      if (end == std::string_view::npos) end = text.size();
      lines.push_back(text.substr(start, end - start));
      start = end + 1;
    }
  }
  std::size_t li = 0;
  auto skip_blank = [&] {
    while (li < lines.size() && detail::split_ws(lines[li]).empty()) ++li;
  };

  skip_blank();
  if (li >= lines.size()) throw Error(ErrorCode::malformed_header, "empty grid file");
  const auto head = detail::split_ws(lines[li]);
  const int head_line = static_cast<int>(li) + 1;
  if (head.size() != 7 || head[0] != "GRID")
    throw Error(ErrorCode::malformed_header,
                "expected 'GRID w h frames cell_size origin_lat origin_lon'");
  EnvSeries env;
  GridSpec& g = env.spec;
  g.width = detail::parse_int(head[1], head_line);
  g.height = detail::parse_int(head[2], head_line);
  g.frames = detail::parse_int(head[3], head_line);
  g.cell_size = detail::parse_double(head[4], head_line);
  g.origin_lat = detail::parse_double(head[5], head_line);
  g.origin_lon = detail::parse_double(head[6], head_line);
  try {
    g.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::malformed_header, e.what());
  }
  ++li;

  std::vector<std::vector<bool>> seen(kFieldNames.size(), std::vector<bool>(g.frames, false));
  for (std::size_t k = 0; k < kFieldNames.size(); ++k)
    detail::field_slot(env, k).assign(g.frames, Field());

  for (;;) {
    skip_blank();
    if (li >= lines.size()) break;
    const int line_no = static_cast<int>(li) + 1;
    const auto toks = detail::split_ws(lines[li]);
    if (toks.size() != 3 || toks[0] != "FIELD")
      throw Error(ErrorCode::malformed_header,
                  "line " + std::to_string(line_no) + ": expected 'FIELD <name> <frame>'");
    std::size_t which = kFieldNames.size();
    for (std::size_t k = 0; k < kFieldNames.size(); ++k)
      if (toks[1] == kFieldNames[k]) which = k;
    if (which == kFieldNames.size())
      throw Error(ErrorCode::malformed_header,
                  "line " + std::to_string(line_no) + ": unknown field '" +
                      std::string(toks[1]) + "'");
    const int frame = detail::parse_int(toks[2], line_no);
    if (frame < 0 || frame >= g.frames)
      throw Error(ErrorCode::shape_mismatch,
                  "line " + std::to_string(line_no) + ": frame " + std::to_string(frame) +
                      " outside declared range");
    if (seen[which][frame])
      throw Error(ErrorCode::shape_mismatch,
                  "line " + std::to_string(line_no) + ": duplicate field frame");
    seen[which][frame] = true;
    ++li;

    Field f(g.height, g.width);
    for (int r = 0; r < g.height; ++r, ++li) {
      if (li >= lines.size())
        throw Error(ErrorCode::shape_mismatch, "truncated field " + std::string(toks[1]));
      const auto row = detail::split_ws(lines[li]);
      if (static_cast<int>(row.size()) != g.width)
        throw Error(ErrorCode::shape_mismatch,
                    "line " + std::to_string(li + 1) + ": expected " +
                        std::to_string(g.width) + " values, got " +
                        std::to_string(row.size()));
      for (int c = 0; c < g.width; ++c) {
        const double v = detail::parse_double(row[c], static_cast<int>(li) + 1);
        if (!std::isfinite(v))
          throw Error(ErrorCode::non_finite,
                      "line " + std::to_string(li + 1) + ": non-finite value");
        f(r, c) = v;
      }
    }
    detail::field_slot(env, which)[frame] = std::move(f);
  }

  for (std::size_t k = 0; k < kFieldNames.size(); ++k)
    for (int t = 0; t < g.frames; ++t)
      if (!seen[k][t])
        throw Error(ErrorCode::shape_mismatch,
                    "missing " + std::string(kFieldNames[k]) + " frame " + std::to_string(t));
  return env;
}

inline EnvSeries load_env(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::io, "cannot open " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  if (is.bad()) throw Error(ErrorCode::io, "read failed: " + path);
  return parse_env(ss.str());
}

}  // namespace waitr
