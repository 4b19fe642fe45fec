#include "graspmap/error.hpp"

namespace graspmap {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::out_of_bounds: return "out_of_bounds";
    case ErrorCode::invalid_depth: return "invalid_depth";
    case ErrorCode::behind_camera: return "behind_camera";
    case ErrorCode::shape_mismatch: return "shape_mismatch";
    case ErrorCode::dimension_mismatch: return "dimension_mismatch";
    case ErrorCode::topology: return "topology";
    case ErrorCode::parse: return "parse";
    case ErrorCode::io: return "io";
    case ErrorCode::empty_input: return "empty_input";
    case ErrorCode::degenerate_geometry: return "degenerate_geometry";
    case ErrorCode::missing_depth: return "missing_depth";
    case ErrorCode::assignment: return "assignment";
    case ErrorCode::missing_contact: return "missing_contact";
    case ErrorCode::insufficient_data: return "insufficient_data";
    case ErrorCode::numeric: return "numeric";
    case ErrorCode::validation: return "validation";
  }
  return "unknown";
}

}  // namespace graspmap
