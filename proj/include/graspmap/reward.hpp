#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "graspmap/kinematics.hpp"
#include "graspmap/refine.hpp"

namespace graspmap {

using hand::HandConfiguration;
using refine::ContactMap;

enum class KappaShape { linear, exponential };

// Which components of the reference hand state enter the tracking error.
// full_state compares wrist position, wrist orientation, and joints;
// joints_only ignores the wrist entirely.
enum class ReferenceMode { full_state, joints_only };

struct TaskWeights {
  double approach = 1.0;
  double lift = 1.0;
  double goal = 1.0;
  double bonus = 2.0;
};

struct RewardConfig {
  double lambda_w = 7.0;      // wrist-position error weight (1/m)
  double lambda_phi = 2.0;    // wrist-orientation error weight (1/rad)
  double lambda_theta = 0.12; // joint error weight (1/rad, L1)
  double beta_pose = 0.55;
  double beta_contact = 0.25;
  int kappa_horizon = 80;     // steps until the guidance weight bottoms out
  double kappa_floor = 0.15;
  KappaShape kappa_shape = KappaShape::linear;
  double contact_threshold = 0.01;  // m, closed comparison
  TaskWeights weights;
  double bonus_radius = 0.05;  // m, strict comparison
  double table_height = 0.6;   // m
  ReferenceMode reference_mode = ReferenceMode::full_state;

  void validate() const;
};

// One timestep of simulated or logged state.
struct SimStateSnapshot {
  int timestep = 0;
  HandConfiguration hand;
  std::vector<Eigen::Vector3d> fingertips;
  Eigen::Vector3d object_pos = Eigen::Vector3d::Zero();
  Eigen::Vector3d goal_pos = Eigen::Vector3d::Zero();
  HandConfiguration reference;  // target state the tracking error is taken against
};

struct TaskTerms {
  double approach = 0;
  double lift = 0;
  double goal = 0;
  double bonus = 0;
  double sum() const { return approach + lift + goal + bonus; }
};

struct RewardBreakdown {
  double track = 0;
  double kappa = 0;
  double pose = 0;
  bool contact = false;
  double contact_term = 0;
  TaskTerms task;
  double total = 0;
};

// exp(-lambda_w*|dw|_2 - lambda_phi*|dphi|_2 - lambda_theta*|dtheta|_1); in (0,1],
// exactly 1 when every error is zero.
double track_score(const Eigen::Vector3d& dw, const Eigen::Vector3d& dphi,
                   const Eigen::VectorXd& dtheta, const RewardConfig& cfg);

// Tracking errors between snapshot.hand and snapshot.reference.  dphi is the
// axis-angle of the relative rotation (geodesic), not a parameter difference.
// joints_only mode zeroes dw and dphi.
void reference_errors(const SimStateSnapshot& snap, const RewardConfig& cfg,
                      Eigen::Vector3d& dw, Eigen::Vector3d& dphi,
                      Eigen::VectorXd& dtheta);

// Guidance decay weight: 1 at t=0 falling to kappa_floor at t=kappa_horizon,
// constant floor afterwards.
double kappa(int t, const RewardConfig& cfg);

double pose_reward(int t, double track, const RewardConfig& cfg);

// True iff any fingertip lies within threshold (inclusive) of some map point.
bool contact_indicator(const std::vector<Eigen::Vector3d>& fingertips,
                       const ContactMap& map, double threshold);

double contact_reward(bool contact, double track, const RewardConfig& cfg);

TaskTerms task_reward(const SimStateSnapshot& snap, const RewardConfig& cfg);

RewardBreakdown total_reward(const SimStateSnapshot& snap, const ContactMap& map,
                             const RewardConfig& cfg);

std::string breakdown_to_json(const RewardBreakdown& b);

}  // namespace graspmap
