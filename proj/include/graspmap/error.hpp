#pragma once

#include <stdexcept>
#include <string>

namespace graspmap {

enum class ErrorCode {
  invalid_argument,
  out_of_bounds,
  invalid_depth,
  behind_camera,
  shape_mismatch,
  dimension_mismatch,
  topology,
  parse,
  io,
  empty_input,
  degenerate_geometry,
  missing_depth,
  assignment,
  missing_contact,
  insufficient_data,
  numeric,
  validation,
};

const char* to_string(ErrorCode code);

// Single exception type used across the library; the code tells callers (and
// the C boundary) what went wrong without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace graspmap
