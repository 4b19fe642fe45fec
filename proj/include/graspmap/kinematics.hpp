#pragma once

#include "graspmap/chain.hpp"

namespace graspmap::hand {

// Full hand state: wrist position, wrist orientation as a canonical
// axis-angle vector (|phi| <= pi), and the joint vector.
struct HandConfiguration {
  Eigen::Vector3d wrist_pos = Eigen::Vector3d::Zero();
  Eigen::Vector3d wrist_rot = Eigen::Vector3d::Zero();  // axis-angle
  Eigen::VectorXd joints;
};

Eigen::Matrix3d rotation_exp(const Eigen::Vector3d& axis_angle);
Eigen::Vector3d rotation_log(const Eigen::Matrix3d& rotation);

// World transforms of every joint's child link, indexed like chain.joints.
std::vector<Eigen::Isometry3d> link_transforms(const KinematicChain& chain,
                                               const HandConfiguration& h);

// World fingertip positions, one per chain.fingertips entry.
std::vector<Eigen::Vector3d> forward_kinematics(const KinematicChain& chain,
                                                const HandConfiguration& h);

// Stacked positional Jacobian, rows 3 * |fingertips|, columns
// [wrist translation (3) | wrist rotation (3) | joints (dof)].
// The rotation block is taken with respect to a small world-frame rotation
// about the wrist origin composed onto the current orientation; apply_step
// uses exactly that composition, so the two stay consistent.
Eigen::MatrixXd fingertip_jacobian(const KinematicChain& chain,
                                   const HandConfiguration& h);

// h "+" delta, where delta is [dw (3) | dphi (3) | dtheta (dof)]. The wrist
// rotation update is R <- exp([dphi]) * R; joints are left unclamped.
HandConfiguration apply_step(const KinematicChain& chain,
                             const HandConfiguration& h,
                             const Eigen::VectorXd& delta);

}  // namespace graspmap::hand
