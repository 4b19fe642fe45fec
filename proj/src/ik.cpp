#include "graspmap/ik.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace graspmap::hand {

using nlohmann::json;

namespace {

Eigen::Vector3d nearest_in_region(const std::vector<Eigen::Vector3d>& region,
                                  const Eigen::Vector3d& p) {
  double best = std::numeric_limits<double>::infinity();
  const Eigen::Vector3d* pick = nullptr;
  for (const auto& q : region) {
    const double d = (q - p).squaredNorm();
    if (d < best) {
      best = d;
      pick = &q;
    }
  }
  return *pick;
}

void check_assignment(const KinematicChain& chain,
                      const FingerRegionAssignment& assignment) {
  if (assignment.regions.size() != chain.fingertips.size())
    fail(ErrorCode::dimension_mismatch,
         "ik: assignment does not match the chain's fingers");
  for (size_t f = 0; f < assignment.regions.size(); ++f)
    if (assignment.regions[f].empty())
      fail(ErrorCode::assignment, "ik: empty region for finger " +
                                      chain.fingertips[f].finger);
}

}  // namespace

double ik_objective(const KinematicChain& chain, const HandConfiguration& h,
                    const FingerRegionAssignment& assignment) {
  check_assignment(chain, assignment);
  const auto tips = forward_kinematics(chain, h);
  double total = 0;
  for (size_t f = 0; f < tips.size(); ++f)
    total += (tips[f] - nearest_in_region(assignment.regions[f], tips[f]))
                 .squaredNorm();
  return total;
}

IkResult solve_ik(const KinematicChain& chain, const HandConfiguration& h0,
                  const FingerRegionAssignment& assignment,
                  const IkConfig& cfg) {
  check_assignment(chain, assignment);
  if (cfg.iterations < 0)
    fail(ErrorCode::invalid_argument, "solve_ik: negative iteration count");

  const int nf = static_cast<int>(chain.fingertips.size());
  const int rows = 3 * nf;

  IkResult result;
  HandConfiguration h = h0;
  h.joints = chain.clamp(h.joints);

  std::vector<Eigen::Vector3d> targets(nf);
  auto pick_targets = [&](const std::vector<Eigen::Vector3d>& tips) {
    for (int f = 0; f < nf; ++f)
      targets[f] = nearest_in_region(assignment.regions[f], tips[f]);
  };
  auto residual = [&](const std::vector<Eigen::Vector3d>& tips) {
    Eigen::VectorXd e(rows);
    for (int f = 0; f < nf; ++f) e.segment<3>(3 * f) = tips[f] - targets[f];
    return e;
  };

  auto tips = forward_kinematics(chain, h);
  pick_targets(tips);
  result.objective_trace.push_back(residual(tips).squaredNorm());

  for (int iter = 0; iter < cfg.iterations; ++iter) {
    const Eigen::VectorXd e = residual(tips);

    Eigen::MatrixXd jac = fingertip_jacobian(chain, h);
    if (!cfg.optimize_wrist) jac.leftCols<6>().setZero();

    Eigen::MatrixXd a = jac * jac.transpose();
    a.diagonal().array() += cfg.lambda_dls * cfg.lambda_dls;
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(a);
    if (ldlt.info() != Eigen::Success)
      fail(ErrorCode::numeric, "solve_ik: damped normal equations not solvable");
    const Eigen::VectorXd delta = -jac.transpose() * ldlt.solve(e);

    h = apply_step(chain, h, cfg.eta * delta);
    h.joints = chain.clamp(h.joints);
    tips = forward_kinematics(chain, h);
    if (cfg.reselect_targets) pick_targets(tips);
    result.objective_trace.push_back(residual(tips).squaredNorm());
  }
  result.configuration = h;
  return result;
}

HandConfiguration default_initial_pose(const KinematicChain& chain,
                                       const refine::ContactMap& map,
                                       const geom::MeshQuery* object,
                                       const InitialPoseOptions& opts) {
  if (map.points.empty())
    fail(ErrorCode::empty_input, "default_initial_pose: empty contact map");

  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  for (const auto& p : map.points) centroid += p;
  centroid /= static_cast<double>(map.points.size());

  Eigen::Vector3d normal = Eigen::Vector3d::Zero();
  if (object && !object->mesh().empty()) {
    for (const auto& p : map.points) {
      const int tri = object->closest_triangle(p);
      const Eigen::Vector3d n = object->mesh().triangle_normal(tri);
      const double len = n.norm();
      if (len > 0) normal += n / len;
    }
  } else if (map.points.size() >= 3) {
    // Least-variance direction of the patch, +Z hemisphere by convention.
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (const auto& p : map.points) {
      const Eigen::Vector3d d = p - centroid;
      cov += d * d.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
    const double spread = eig.eigenvalues()[2];
    if (eig.info() == Eigen::Success && spread > 0 &&
        eig.eigenvalues()[1] > 1e-9 * spread) {
      normal = eig.eigenvectors().col(0);
      if (normal.z() < 0) normal = -normal;
    }
  }
  if (normal.norm() < 1e-9) normal = Eigen::Vector3d::UnitZ();
  normal.normalize();

  HandConfiguration h;
  h.wrist_pos = centroid + opts.standoff * normal;
  // Palm is +Z of the wrist frame; rotate +Z onto -normal (toward the
  // contacts) by the minimal rotation.
  const Eigen::Vector3d z = Eigen::Vector3d::UnitZ();
  const Eigen::Vector3d d = -normal;
  const double c = z.dot(d);
  if (c < -1.0 + 1e-12) {
    h.wrist_rot = Eigen::Vector3d(M_PI, 0, 0);  // straight down: flip about X
  } else {
    const Eigen::Vector3d axis = z.cross(d);
    const double s = axis.norm();
    h.wrist_rot = s < 1e-12 ? Eigen::Vector3d::Zero()
                            : Eigen::Vector3d(axis / s * std::atan2(s, c));
  }
  h.joints = chain.mid_range();
  return h;
}

std::string pose_to_json(const PseudoPose& pose) {
  json j;
  j["intent_id"] = pose.intent_id;
  const auto& h = pose.configuration;
  j["w"] = {h.wrist_pos.x(), h.wrist_pos.y(), h.wrist_pos.z()};
  j["phi"] = {h.wrist_rot.x(), h.wrist_rot.y(), h.wrist_rot.z()};
  j["theta"] = std::vector<double>(h.joints.data(),
                                   h.joints.data() + h.joints.size());
  j["objective_trace"] = pose.objective_trace;
  return j.dump();
}

PseudoPose pose_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::parse, std::string("pose: ") + e.what());
  }
  PseudoPose pose;
  try {
    pose.intent_id = j.at("intent_id").get<int>();
    auto& h = pose.configuration;
    for (int k = 0; k < 3; ++k) {
      h.wrist_pos[k] = j.at("w").at(k).get<double>();
      h.wrist_rot[k] = j.at("phi").at(k).get<double>();
    }
    const auto theta = j.at("theta").get<std::vector<double>>();
    h.joints = Eigen::Map<const Eigen::VectorXd>(theta.data(), theta.size());
    pose.objective_trace =
        j.value("objective_trace", std::vector<double>());
  } catch (const json::exception& e) {
    fail(ErrorCode::parse, std::string("pose: ") + e.what());
  }
  return pose;
}

void save_pose(const PseudoPose& pose, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::io, "pose: cannot write " + path);
  f << pose_to_json(pose) << '\n';
  if (!f) fail(ErrorCode::io, "pose: write failed for " + path);
}

PseudoPose load_pose(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::io, "pose: cannot open " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  return pose_from_json(buf.str());
}

}  // namespace graspmap::hand
