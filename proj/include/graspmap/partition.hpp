#pragma once

#include <optional>

#include "graspmap/kinematics.hpp"
#include "graspmap/refine.hpp"

namespace graspmap::hand {

struct PartitionOptions {
  // +1 / -1 force the thumb onto the upper / lower half of the principal
  // axis; 0 picks the half whose centroid lies toward -Y of the wrist hint
  // (the thumb edge of the palm), or the lower half without a hint.
  int thumb_side = 0;
  std::optional<Eigen::Matrix3d> wrist_rotation;  // orientation at the start pose
};

struct FingerRegionAssignment {
  // One region per chain.fingertips entry, in chain order.
  std::vector<std::vector<Eigen::Vector3d>> regions;
  Eigen::Vector3d principal_axis = Eigen::Vector3d::UnitX();
  int thumb_finger = 0;
};

// Splits the contact points at the median of their projections onto the
// first principal component: thumb half on one side, the remaining fingers
// covering contiguous equal-count runs of the other half, ordered along the
// axis. Throws degenerate_geometry when all points coincide, empty_input
// when the map is empty, and dimension errors when the chain has fewer than
// two fingers.
FingerRegionAssignment partition_regions(const refine::ContactMap& map,
                                         const KinematicChain& chain,
                                         const PartitionOptions& opts = {});

}  // namespace graspmap::hand
