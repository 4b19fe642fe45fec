#include "graspmap/kinematics.hpp"

#include <cmath>
#include <map>

namespace graspmap::hand {

Eigen::Matrix3d rotation_exp(const Eigen::Vector3d& v) {
  const double angle = v.norm();
  if (angle < 1e-12) {
    // First-order term is enough at this scale and keeps exp(0) exact.
    Eigen::Matrix3d r = Eigen::Matrix3d::Identity();
    r(0, 1) = -v.z(); r(0, 2) = v.y();
    r(1, 0) = v.z();  r(1, 2) = -v.x();
    r(2, 0) = -v.y(); r(2, 1) = v.x();
    return r;
  }
  return Eigen::AngleAxisd(angle, v / angle).toRotationMatrix();
}

Eigen::Vector3d rotation_log(const Eigen::Matrix3d& r) {
  const Eigen::AngleAxisd aa(r);
  double angle = aa.angle();
  Eigen::Vector3d axis = aa.axis();
  if (angle > M_PI) {  // keep the representation canonical
    angle = 2 * M_PI - angle;
    axis = -axis;
  }
  return angle * axis;
}

std::vector<Eigen::Isometry3d> link_transforms(const KinematicChain& chain,
                                               const HandConfiguration& h) {
  if (h.joints.size() != chain.dof)
    fail(ErrorCode::dimension_mismatch,
         "forward_kinematics: joint vector length mismatch");
  Eigen::Isometry3d wrist = Eigen::Isometry3d::Identity();
  wrist.linear() = rotation_exp(h.wrist_rot);
  wrist.translation() = h.wrist_pos;

  std::vector<Eigen::Isometry3d> world(chain.joints.size());
  std::map<std::string, const Eigen::Isometry3d*> by_link;
  by_link[chain.root] = &wrist;
  for (int ji : chain.topo_order) {
    const Joint& j = chain.joints[ji];
    const Eigen::Isometry3d& parent = *by_link.at(j.parent);
    Eigen::Isometry3d local = j.origin;
    if (j.revolute)
      local = local * Eigen::AngleAxisd(h.joints[j.dof_index], j.axis);
    world[ji] = parent * local;
    by_link[j.child] = &world[ji];
  }
  return world;
}

std::vector<Eigen::Vector3d> forward_kinematics(const KinematicChain& chain,
                                                const HandConfiguration& h) {
  const auto world = link_transforms(chain, h);
  std::vector<Eigen::Vector3d> tips;
  tips.reserve(chain.fingertips.size());
  for (int link : chain.tip_links) tips.push_back(world[link].translation());
  return tips;
}

Eigen::MatrixXd fingertip_jacobian(const KinematicChain& chain,
                                   const HandConfiguration& h) {
  const auto world = link_transforms(chain, h);
  const int nf = static_cast<int>(chain.fingertips.size());
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(3 * nf, 6 + chain.dof);

  for (int f = 0; f < nf; ++f) {
    const Eigen::Vector3d tip = world[chain.tip_links[f]].translation();
    const Eigen::Vector3d lever = tip - h.wrist_pos;

    jac.block<3, 3>(3 * f, 0).setIdentity();  // wrist translation
    // world-frame rotation about the wrist origin: d tip = omega x lever
    jac.block<3, 3>(3 * f, 3) << 0, lever.z(), -lever.y(),
        -lever.z(), 0, lever.x(),
        lever.y(), -lever.x(), 0;

    for (int ji : chain.tip_chains[f]) {
      const Joint& j = chain.joints[ji];
      if (!j.revolute) continue;
      // world[ji] already includes the joint rotation; the axis direction is
      // unaffected by a rotation about itself.
      const Eigen::Vector3d axis_world = world[ji].linear() * j.axis;
      const Eigen::Vector3d joint_pos = world[ji].translation();
      jac.block<3, 1>(3 * f, 6 + j.dof_index) =
          axis_world.cross(tip - joint_pos);
    }
  }
  return jac;
}

HandConfiguration apply_step(const KinematicChain& chain,
                             const HandConfiguration& h,
                             const Eigen::VectorXd& delta) {
  if (delta.size() != 6 + chain.dof)
    fail(ErrorCode::dimension_mismatch, "apply_step: delta length mismatch");
  HandConfiguration out;
  out.wrist_pos = h.wrist_pos + delta.head<3>();
  out.wrist_rot =
      rotation_log(rotation_exp(delta.segment<3>(3)) * rotation_exp(h.wrist_rot));
  out.joints = h.joints + delta.tail(chain.dof);
  return out;
}

}  // namespace graspmap::hand
