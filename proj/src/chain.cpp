#include "graspmap/chain.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

namespace graspmap::hand {

using nlohmann::json;

void KinematicChain::finalize() {
  if (joints.empty()) fail(ErrorCode::empty_input, "chain: no joints");
  if (fingertips.empty()) fail(ErrorCode::empty_input, "chain: no fingertips");

  std::set<std::string> joint_names;
  std::set<std::string> children;
  std::set<std::string> parents;
  std::map<std::string, int> parent_joint;  // link -> joint producing it
  dof = 0;
  for (size_t i = 0; i < joints.size(); ++i) {
    Joint& j = joints[i];
    if (!joint_names.insert(j.name).second)
      fail(ErrorCode::topology, "chain: duplicate joint name " + j.name);
    if (j.parent == j.child)
      fail(ErrorCode::topology, "chain: joint " + j.name + " loops on itself");
    if (!parent_joint.emplace(j.child, static_cast<int>(i)).second)
      fail(ErrorCode::topology, "chain: link " + j.child + " has two parents");
    children.insert(j.child);
    parents.insert(j.parent);
    if (j.revolute) {
      if (j.axis.norm() < 1e-9)
        fail(ErrorCode::invalid_argument, "chain: joint " + j.name + " has zero axis");
      j.axis.normalize();
      if (j.lower > j.upper)
        fail(ErrorCode::invalid_argument,
             "chain: joint " + j.name + " has lower > upper");
      j.dof_index = dof++;
    } else {
      j.dof_index = -1;
    }
  }

  std::vector<std::string> roots;
  for (const auto& p : parents)
    if (!children.count(p)) roots.push_back(p);
  if (roots.size() != 1)
    fail(ErrorCode::topology, "chain: expected exactly one root link");
  root = roots[0];

  // Parents-first order; a leftover joint means its parent link is
  // unreachable from the root (a detached cycle).
  topo_order.clear();
  std::set<std::string> resolved = {root};
  std::vector<bool> placed(joints.size(), false);
  bool progress = true;
  while (topo_order.size() < joints.size() && progress) {
    progress = false;
    for (size_t i = 0; i < joints.size(); ++i) {
      if (placed[i] || !resolved.count(joints[i].parent)) continue;
      placed[i] = true;
      resolved.insert(joints[i].child);
      topo_order.push_back(static_cast<int>(i));
      progress = true;
    }
  }
  if (topo_order.size() != joints.size())
    fail(ErrorCode::topology, "chain: joints detached from the root");

  tip_chains.clear();
  tip_links.clear();
  for (const auto& tip : fingertips) {
    auto it = parent_joint.find(tip.frame);
    if (it == parent_joint.end())
      fail(ErrorCode::topology, "chain: fingertip frame " + tip.frame +
                                    " is not a link");
    tip_links.push_back(it->second);
    std::vector<int> path;
    std::string link = tip.frame;
    while (link != root) {
      const int j = parent_joint.at(link);
      path.push_back(j);
      link = joints[j].parent;
    }
    std::reverse(path.begin(), path.end());
    tip_chains.push_back(std::move(path));
  }
}

Eigen::VectorXd KinematicChain::mid_range() const {
  Eigen::VectorXd theta(dof);
  for (const auto& j : joints)
    if (j.revolute) theta[j.dof_index] = 0.5 * (j.lower + j.upper);
  return theta;
}

Eigen::VectorXd KinematicChain::clamp(const Eigen::VectorXd& theta) const {
  if (theta.size() != dof)
    fail(ErrorCode::dimension_mismatch, "chain: joint vector length mismatch");
  Eigen::VectorXd out = theta;
  for (const auto& j : joints)
    if (j.revolute)
      out[j.dof_index] = std::clamp(out[j.dof_index], j.lower, j.upper);
  return out;
}

int KinematicChain::thumb_index() const {
  for (size_t i = 0; i < fingertips.size(); ++i) {
    std::string f = fingertips[i].finger;
    std::transform(f.begin(), f.end(), f.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (f == "thumb") return static_cast<int>(i);
  }
  return 0;
}

namespace {

Eigen::Isometry3d origin_from_json(const json& j) {
  Eigen::Isometry3d t = Eigen::Isometry3d::Identity();
  if (j.contains("xyz")) {
    const auto& v = j["xyz"];
    t.translation() = Eigen::Vector3d(v.at(0), v.at(1), v.at(2));
  }
  if (j.contains("rpy")) {
    const auto& v = j["rpy"];
    t.linear() =
        (Eigen::AngleAxisd(v.at(2).get<double>(), Eigen::Vector3d::UnitZ()) *
         Eigen::AngleAxisd(v.at(1).get<double>(), Eigen::Vector3d::UnitY()) *
         Eigen::AngleAxisd(v.at(0).get<double>(), Eigen::Vector3d::UnitX()))
            .toRotationMatrix();
  }
  return t;
}

json origin_to_json(const Eigen::Isometry3d& t) {
  const Eigen::Vector3d xyz = t.translation();
  // Recover extrinsic XYZ angles (matches origin_from_json).
  const Eigen::Matrix3d r = t.linear();
  const double pitch = std::asin(std::clamp(-r(2, 0), -1.0, 1.0));
  double roll, yaw;
  if (std::abs(std::cos(pitch)) > 1e-9) {
    roll = std::atan2(r(2, 1), r(2, 2));
    yaw = std::atan2(r(1, 0), r(0, 0));
  } else {
    roll = std::atan2(-r(1, 2), r(1, 1));
    yaw = 0;
  }
  return {{"xyz", {xyz.x(), xyz.y(), xyz.z()}}, {"rpy", {roll, pitch, yaw}}};
}

}  // namespace

KinematicChain chain_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::parse, std::string("chain: ") + e.what());
  }
  KinematicChain chain;
  try {
    chain.name = doc.value("name", std::string("hand"));
    for (const auto& jj : doc.at("joints")) {
      Joint j;
      j.name = jj.at("name").get<std::string>();
      j.parent = jj.at("parent").get<std::string>();
      j.child = jj.at("child").get<std::string>();
      if (jj.contains("origin")) j.origin = origin_from_json(jj["origin"]);
      if (jj.contains("axis")) {
        const auto& a = jj["axis"];
        j.axis = Eigen::Vector3d(a.at(0), a.at(1), a.at(2));
        j.revolute = true;
        const auto& lim = jj.at("limits");
        j.lower = lim.at(0).get<double>();
        j.upper = lim.at(1).get<double>();
      }
      chain.joints.push_back(std::move(j));
    }
    for (const auto& tj : doc.at("fingertips"))
      chain.fingertips.push_back({tj.at("finger").get<std::string>(),
                                  tj.at("frame").get<std::string>()});
  } catch (const json::exception& e) {
    fail(ErrorCode::parse, std::string("chain: ") + e.what());
  }
  chain.finalize();
  return chain;
}

KinematicChain load_chain(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::io, "chain: cannot open " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  return chain_from_json(buf.str());
}

std::string chain_to_json(const KinematicChain& chain) {
  json doc;
  doc["name"] = chain.name;
  json joints = json::array();
  for (const auto& j : chain.joints) {
    json jj;
    jj["name"] = j.name;
    jj["parent"] = j.parent;
    jj["child"] = j.child;
    jj["origin"] = origin_to_json(j.origin);
    if (j.revolute) {
      jj["axis"] = {j.axis.x(), j.axis.y(), j.axis.z()};
      jj["limits"] = {j.lower, j.upper};
    }
    joints.push_back(std::move(jj));
  }
  doc["joints"] = std::move(joints);
  json tips = json::array();
  for (const auto& t : chain.fingertips)
    tips.push_back({{"finger", t.finger}, {"frame", t.frame}});
  doc["fingertips"] = std::move(tips);
  return doc.dump(2);
}

void save_chain(const KinematicChain& chain, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::io, "chain: cannot write " + path);
  f << chain_to_json(chain) << '\n';
  if (!f) fail(ErrorCode::io, "chain: write failed for " + path);
}

namespace {

Eigen::Isometry3d translate(double x, double y, double z) {
  Eigen::Isometry3d t = Eigen::Isometry3d::Identity();
  t.translation() = Eigen::Vector3d(x, y, z);
  return t;
}

// One finger: abduction about Z at the knuckle, then three flexion joints
// about Y, links along +X, tip frame on a fixed joint at the distal end.
void add_finger(KinematicChain& chain, const std::string& finger,
                const Eigen::Isometry3d& mount, double segment,
                double abduction, double flex_lo, double flex_hi) {
  const std::string base = finger;
  auto joint = [&](const std::string& name, const std::string& parent,
                   const std::string& child, const Eigen::Isometry3d& origin,
                   const Eigen::Vector3d& axis, double lo, double hi) {
    Joint j;
    j.name = name;
    j.parent = parent;
    j.child = child;
    j.origin = origin;
    j.revolute = true;
    j.axis = axis;
    j.lower = lo;
    j.upper = hi;
    chain.joints.push_back(std::move(j));
  };
  // Flexion about -Y curls the +X links toward +Z, the palm side.
  const Eigen::Vector3d flex_axis = -Eigen::Vector3d::UnitY();
  joint(base + "_abduct", "wrist", base + "_knuckle", mount,
        Eigen::Vector3d::UnitZ(), -abduction, abduction);
  joint(base + "_proximal", base + "_knuckle", base + "_p",
        translate(segment * 0.4, 0, 0), flex_axis, flex_lo, flex_hi);
  joint(base + "_middle", base + "_p", base + "_m", translate(segment, 0, 0),
        flex_axis, flex_lo, flex_hi);
  joint(base + "_distal", base + "_m", base + "_d",
        translate(segment * 0.7, 0, 0), flex_axis, flex_lo, flex_hi * 0.7);
  Joint tip;
  tip.name = base + "_tip_mount";
  tip.parent = base + "_d";
  tip.child = base + "_tip";
  tip.origin = translate(segment * 0.5, 0, 0);
  chain.joints.push_back(std::move(tip));
  chain.fingertips.push_back({finger, base + "_tip"});
}

KinematicChain make_hand(int fingers) {
  KinematicChain chain;
  chain.name = fingers == 5 ? "five_finger_hand" : "four_finger_hand";
  // Thumb mounted at the -Y palm edge, rotated to oppose the fingers.
  Eigen::Isometry3d thumb_mount = translate(0.02, -0.035, 0.01);
  thumb_mount.linear() =
      (Eigen::AngleAxisd(-M_PI / 2, Eigen::Vector3d::UnitX()) *
       Eigen::AngleAxisd(M_PI / 6, Eigen::Vector3d::UnitY()))
          .toRotationMatrix();
  add_finger(chain, "thumb", thumb_mount, 0.045, 0.6, -0.3, 1.4);
  const char* names[] = {"index", "middle", "ring", "little"};
  const double y[] = {-0.022, 0.0, 0.022, 0.044};
  const double len[] = {0.042, 0.046, 0.042, 0.036};
  for (int f = 0; f < fingers - 1; ++f)
    add_finger(chain, names[f], translate(0.07, y[f], 0), len[f], 0.35, 0.0,
               1.6);
  chain.finalize();
  return chain;
}

}  // namespace

KinematicChain make_five_finger_hand() { return make_hand(5); }
KinematicChain make_four_finger_hand() { return make_hand(4); }

}  // namespace graspmap::hand
