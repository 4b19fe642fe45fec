#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>
#include <string>
#include <vector>

#include "graspmap/error.hpp"

namespace graspmap::hand {

// One joint of the hand tree. A joint with an axis is revolute and owns one
// entry of the joint vector; without an axis it is fixed and only contributes
// its origin transform (used for fingertip frames).
struct Joint {
  std::string name;
  std::string parent;  // parent link
  std::string child;   // child link
  Eigen::Isometry3d origin = Eigen::Isometry3d::Identity();
  bool revolute = false;
  Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();  // child-frame axis
  double lower = 0;
  double upper = 0;
  int dof_index = -1;  // position in the joint vector, revolute joints only
};

struct Fingertip {
  std::string finger;  // e.g. "thumb", "index"
  std::string frame;   // link whose origin is the tip point
};

// Tree of revolute joints under a free-floating wrist root. Construction is
// finished by finalize(), which validates the tree and assigns joint indices
// in document order.
struct KinematicChain {
  std::string name;
  std::string root;  // wrist link
  std::vector<Joint> joints;
  std::vector<Fingertip> fingertips;

  int dof = 0;  // number of revolute joints
  std::vector<int> topo_order;              // joint indices, parents first
  std::vector<std::vector<int>> tip_chains; // per fingertip: joints root->tip
  std::vector<int> tip_links;               // per fingertip: joint whose child is the frame

  void finalize();  // throws topology / invalid_argument on a malformed tree

  Eigen::VectorXd mid_range() const;
  Eigen::VectorXd clamp(const Eigen::VectorXd& theta) const;

  // Index into fingertips of the thumb: the finger literally named "thumb"
  // (case-insensitive) or the first finger otherwise.
  int thumb_index() const;
};

// Document form:
//   {"name", "joints": [{"name", "parent", "child",
//     "origin": {"xyz": [3], "rpy": [3]}, "axis": [3], "limits": [lo, hi]}],
//    "fingertips": [{"finger", "frame"}]}
// rpy is extrinsic XYZ (roll about X, then pitch about Y, then yaw about Z).
// Joints without "axis"/"limits" are fixed.
KinematicChain chain_from_json(const std::string& text);
KinematicChain load_chain(const std::string& path);
std::string chain_to_json(const KinematicChain& chain);
void save_chain(const KinematicChain& chain, const std::string& path);

// Built-in test embodiments: five fingers x four revolute joints (20 joint
// values) and four fingers x four (16). Fingers extend along +X of the wrist,
// the palm faces +Z, the thumb is mounted on the -Y edge of the palm.
KinematicChain make_five_finger_hand();
KinematicChain make_four_finger_hand();

}  // namespace graspmap::hand
