#pragma once

#include "graspmap/mesh_query.hpp"
#include "graspmap/partition.hpp"

namespace graspmap::hand {

struct IkConfig {
  int iterations = 12;
  double lambda_dls = 0.05;  // damping
  double eta = 1.0;          // step size
  bool reselect_targets = true;  // re-pick nearest region points per iteration
  bool optimize_wrist = true;    // false solves over the joints only
};

// Sum over fingers of the squared distance from the fingertip to the nearest
// point of its region. Throws assignment when a finger's region is empty.
double ik_objective(const KinematicChain& chain, const HandConfiguration& h,
                    const FingerRegionAssignment& assignment);

struct IkResult {
  HandConfiguration configuration;
  std::vector<double> objective_trace;  // iterations + 1 values
};

// Damped least-squares retargeting toward per-finger nearest region points.
// Joints are clamped to their limits after every update.
IkResult solve_ik(const KinematicChain& chain, const HandConfiguration& h0,
                  const FingerRegionAssignment& assignment,
                  const IkConfig& cfg = {});

struct InitialPoseOptions {
  double standoff = 0.12;  // wrist offset from the contact centroid, meters
};

// Wrist placed on the mean outward surface normal through the contact
// centroid, palm (+Z of the wrist) facing the centroid, joints mid-range.
// The mesh supplies outward normals; without it (or with a degenerate
// normal estimate) the offset direction falls back to world +Z.
HandConfiguration default_initial_pose(const KinematicChain& chain,
                                       const refine::ContactMap& map,
                                       const geom::MeshQuery* object = nullptr,
                                       const InitialPoseOptions& opts = {});

// {"intent_id", "w", "phi", "theta", "objective_trace"}
struct PseudoPose {
  int intent_id = 0;
  HandConfiguration configuration;
  std::vector<double> objective_trace;
};
std::string pose_to_json(const PseudoPose& pose);
PseudoPose pose_from_json(const std::string& text);
void save_pose(const PseudoPose& pose, const std::string& path);
PseudoPose load_pose(const std::string& path);

}  // namespace graspmap::hand
