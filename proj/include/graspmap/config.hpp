#pragma once

#include <string>

#include "graspmap/ik.hpp"
#include "graspmap/ingest.hpp"
#include "graspmap/metrics.hpp"
#include "graspmap/refine.hpp"
#include "graspmap/reward.hpp"

namespace graspmap {

// Everything the pipeline commands need, as one document.  Unknown keys are
// rejected; missing keys keep their defaults, so a partial document is a valid
// override file.
struct PipelineConfig {
  std::string chain_path = "hand.json";  // resolved against the bundle directory
  ingest::CalibrationOptions calibration;
  refine::RefineConfig refine;
  hand::IkConfig ik;
  hand::InitialPoseOptions initial_pose;
  int thumb_side = 0;  // see PartitionOptions
  RewardConfig reward;
  MetricsConfig metrics;
  std::string object_mesh;  // optional mesh path enabling coverage during eval

  void validate() const;
};

PipelineConfig config_from_json(const std::string& text);
std::string config_to_json(const PipelineConfig& cfg);

PipelineConfig load_config(const std::string& path);
void save_config(const PipelineConfig& cfg, const std::string& path);

// The built-in defaults, serialized.
std::string default_config_json();

}  // namespace graspmap
