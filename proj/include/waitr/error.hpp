#pragma once

#include <stdexcept>
#include <string>

namespace waitr {

enum class ErrorCode {
  io,
  malformed_header,
  shape_mismatch,
  non_finite,
  invalid_argument,
  out_of_range,
  unknown_node,
  no_waypoints,
  invalid_transition,
  config,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::io: return "io";
    case ErrorCode::malformed_header: return "malformed_header";
    case ErrorCode::shape_mismatch: return "shape_mismatch";
    case ErrorCode::non_finite: return "non_finite";
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::out_of_range: return "out_of_range";
    case ErrorCode::unknown_node: return "unknown_node";
    case ErrorCode::no_waypoints: return "no_waypoints";
    case ErrorCode::invalid_transition: return "invalid_transition";
    case ErrorCode::config: return "config";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace waitr
