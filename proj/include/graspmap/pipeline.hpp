#pragma once

#include <optional>
#include <string>
#include <vector>

#include "graspmap/bundle.hpp"
#include "graspmap/metrics.hpp"
#include "graspmap/refine.hpp"

namespace graspmap {

struct RunOptions {
  std::optional<int> intent;  // restrict to one intent id
  int threads = 0;            // > 0 overrides the config thread count
};

struct IntentRunSummary {
  int intent_id = 0;
  refine::Diagnostics diagnostics;
  std::size_t map_points = 0;
  double final_objective = 0;
  std::string map_file;
  std::string ply_file;
  std::string pose_file;
};

struct RunResult {
  std::vector<IntentRunSummary> intents;
  std::string diagnostics_file;
};

// Per intent: calibrate confidences, refine across views, build the contact
// map, derive the grasp pose.  All outputs are staged in a scratch
// subdirectory and moved into out_dir only after every intent has succeeded,
// so a failed run leaves no partial output behind.
RunResult run_pipeline(const LoadedScene& scene, const std::string& out_dir,
                       const RunOptions& opts = {});

// Loads every *.jsonl episode log under logs_dir (sorted by name), pairs each
// with contact_map_<intent>.json from maps_dir (a log without an intent id
// needs maps_dir to hold exactly one map), and runs the metric sweep.  A
// relative object_mesh path in cfg resolves against config_dir.
EvalReport evaluate_directory(const std::string& logs_dir,
                              const std::string& maps_dir,
                              const PipelineConfig& cfg,
                              const std::string& config_dir = ".");

}  // namespace graspmap
