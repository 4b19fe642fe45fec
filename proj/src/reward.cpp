#include "graspmap/reward.hpp"

#include <cmath>

#include "json.hpp"

#include "graspmap/error.hpp"

namespace graspmap {

using json = nlohmann::ordered_json;

void RewardConfig::validate() const {
  if (lambda_w < 0 || lambda_phi < 0 || lambda_theta < 0)
    fail(ErrorCode::validation, "reward: tracking weights must be >= 0");
  if (beta_pose < 0 || beta_contact < 0)
    fail(ErrorCode::validation, "reward: beta coefficients must be >= 0");
  if (kappa_horizon < 1)
    fail(ErrorCode::validation, "reward: kappa_horizon must be >= 1");
  if (!(kappa_floor > 0) || kappa_floor > 1)
    fail(ErrorCode::validation, "reward: kappa_floor must be in (0, 1]");
  if (contact_threshold < 0)
    fail(ErrorCode::validation, "reward: contact_threshold must be >= 0");
  if (weights.approach < 0 || weights.lift < 0 || weights.goal < 0 ||
      weights.bonus < 0)
    fail(ErrorCode::validation, "reward: task weights must be >= 0");
  if (bonus_radius < 0)
    fail(ErrorCode::validation, "reward: bonus_radius must be >= 0");
}

double track_score(const Eigen::Vector3d& dw, const Eigen::Vector3d& dphi,
                   const Eigen::VectorXd& dtheta, const RewardConfig& cfg) {
  const double cost = cfg.lambda_w * dw.norm() + cfg.lambda_phi * dphi.norm() +
                      cfg.lambda_theta * dtheta.lpNorm<1>();
  return std::exp(-cost);
}

void reference_errors(const SimStateSnapshot& snap, const RewardConfig& cfg,
                      Eigen::Vector3d& dw, Eigen::Vector3d& dphi,
                      Eigen::VectorXd& dtheta) {
  if (snap.hand.joints.size() != snap.reference.joints.size())
    fail(ErrorCode::dimension_mismatch,
         "reward: snapshot and reference joint dimensions differ");
  dtheta = snap.hand.joints - snap.reference.joints;
  if (cfg.reference_mode == ReferenceMode::joints_only) {
    dw.setZero();
    dphi.setZero();
    return;
  }
  dw = snap.hand.wrist_pos - snap.reference.wrist_pos;
  dphi = hand::rotation_log(hand::rotation_exp(snap.hand.wrist_rot) *
                            hand::rotation_exp(snap.reference.wrist_rot).transpose());
}

double kappa(int t, const RewardConfig& cfg) {
  if (t < 0) fail(ErrorCode::invalid_argument, "kappa: negative timestep");
  if (t >= cfg.kappa_horizon) return cfg.kappa_floor;
  const double frac = static_cast<double>(t) / cfg.kappa_horizon;
  if (cfg.kappa_shape == KappaShape::exponential)
    return std::pow(cfg.kappa_floor, frac);
  return 1.0 - (1.0 - cfg.kappa_floor) * frac;
}

double pose_reward(int t, double track, const RewardConfig& cfg) {
  return cfg.beta_pose * kappa(t, cfg) * track;
}

bool contact_indicator(const std::vector<Eigen::Vector3d>& fingertips,
                       const ContactMap& map, double threshold) {
  if (map.points.empty())
    fail(ErrorCode::assignment, "contact_indicator: empty contact map");
  const double sq = threshold * threshold;
  for (const auto& tip : fingertips)
    for (const auto& p : map.points)
      if ((tip - p).squaredNorm() <= sq) return true;
  return false;
}

double contact_reward(bool contact, double track, const RewardConfig& cfg) {
  return contact ? cfg.beta_contact * track : 0.0;
}

TaskTerms task_reward(const SimStateSnapshot& snap, const RewardConfig& cfg) {
  TaskTerms t;
  if (!snap.fingertips.empty()) {
    double mean = 0;
    for (const auto& tip : snap.fingertips)
      mean += (tip - snap.object_pos).norm();
    mean /= static_cast<double>(snap.fingertips.size());
    t.approach = -cfg.weights.approach * mean;
  }
  t.lift = cfg.weights.lift *
           std::max(0.0, snap.object_pos.z() - cfg.table_height);
  const double goal_dist = (snap.object_pos - snap.goal_pos).norm();
  t.goal = -cfg.weights.goal * goal_dist;
  t.bonus = goal_dist < cfg.bonus_radius ? cfg.weights.bonus : 0.0;
  return t;
}

RewardBreakdown total_reward(const SimStateSnapshot& snap, const ContactMap& map,
                             const RewardConfig& cfg) {
  Eigen::Vector3d dw, dphi;
  Eigen::VectorXd dtheta;
  reference_errors(snap, cfg, dw, dphi, dtheta);

  RewardBreakdown b;
  b.track = track_score(dw, dphi, dtheta, cfg);
  b.kappa = kappa(snap.timestep, cfg);
  b.pose = cfg.beta_pose * b.kappa * b.track;
  b.contact = contact_indicator(snap.fingertips, map, cfg.contact_threshold);
  b.contact_term = contact_reward(b.contact, b.track, cfg);
  b.task = task_reward(snap, cfg);
  b.total = b.pose + b.contact_term + b.task.sum();
  return b;
}

std::string breakdown_to_json(const RewardBreakdown& b) {
  json j;
  j["track"] = b.track;
  j["kappa"] = b.kappa;
  j["pose"] = b.pose;
  j["contact"] = b.contact;
  j["contact_term"] = b.contact_term;
  j["approach"] = b.task.approach;
  j["lift"] = b.task.lift;
  j["goal"] = b.task.goal;
  j["bonus"] = b.task.bonus;
  j["total"] = b.total;
  return j.dump();
}

}  // namespace graspmap
