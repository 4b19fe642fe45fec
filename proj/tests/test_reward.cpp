#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "json.hpp"

#include "graspmap/reward.hpp"
#include "test_support.hpp"

using namespace graspmap;
using testsup::code_of;

namespace {

SimStateSnapshot zero_snapshot(int dof = 4) {
  SimStateSnapshot s;
  s.hand.joints = Eigen::VectorXd::Zero(dof);
  s.reference.joints = Eigen::VectorXd::Zero(dof);
  s.fingertips = {Eigen::Vector3d::Zero()};
  return s;
}

ContactMap single_point_map(const Eigen::Vector3d& p) {
  ContactMap map;
  map.intent_id = 1;
  map.points = {p};
  map.scores = {1.0};
  map.seed_indices = {0};
  return map;
}

}  // namespace

TEST_CASE("tracking score is exactly one at zero error") {
  RewardConfig cfg;
  const Eigen::Vector3d zero = Eigen::Vector3d::Zero();
  CHECK(track_score(zero, zero, Eigen::VectorXd::Zero(20), cfg) == 1.0);
}

TEST_CASE("tracking score matches the closed form on each error channel") {
  RewardConfig cfg;
  const Eigen::Vector3d zero = Eigen::Vector3d::Zero();
  const Eigen::VectorXd ztheta = Eigen::VectorXd::Zero(6);

  CHECK(track_score({0.1, 0, 0}, zero, ztheta, cfg) ==
        doctest::Approx(std::exp(-0.7)).epsilon(1e-14));
  CHECK(track_score(zero, {0, 0.25, 0}, ztheta, cfg) ==
        doctest::Approx(std::exp(-0.5)).epsilon(1e-14));
  Eigen::VectorXd dtheta = Eigen::VectorXd::Zero(6);
  dtheta << 0.5, -0.5, 0, 0, 0, 0;  // L1 norm 1
  CHECK(track_score(zero, zero, dtheta, cfg) ==
        doctest::Approx(std::exp(-0.12)).epsilon(1e-14));
  // All channels multiply inside the exponent.
  CHECK(track_score({0.1, 0, 0}, {0, 0.25, 0}, dtheta, cfg) ==
        doctest::Approx(std::exp(-0.7 - 0.5 - 0.12)).epsilon(1e-14));
}

TEST_CASE("tracking score is monotone and bounded") {
  RewardConfig cfg;
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double prev = 2.0;
  for (int i = 0; i < 50; ++i) {
    const double magnitude = 0.05 * i;
    const Eigen::Vector3d dw(magnitude, 0, 0);
    const double s = track_score(dw, Eigen::Vector3d::Zero(),
                                 Eigen::VectorXd::Zero(3), cfg);
    CHECK(s > 0.0);
    CHECK(s <= 1.0);
    CHECK(s < prev + 1e-18);
    prev = s;
  }
  for (int i = 0; i < 200; ++i) {
    const Eigen::Vector3d dw(u(rng), u(rng), u(rng));
    const Eigen::Vector3d dphi(u(rng), u(rng), u(rng));
    Eigen::VectorXd dtheta(5);
    for (int k = 0; k < 5; ++k) dtheta[k] = u(rng) - 0.5;
    const double s = track_score(dw, dphi, dtheta, cfg);
    CHECK(s > 0.0);
    CHECK(s <= 1.0);
  }
}

TEST_CASE("guidance weight anneals linearly to its floor") {
  RewardConfig cfg;  // horizon 80, floor 0.15
  CHECK(kappa(0, cfg) == 1.0);
  CHECK(kappa(80, cfg) == 0.15);
  CHECK(kappa(200, cfg) == 0.15);
  CHECK(kappa(40, cfg) == doctest::Approx(0.575).epsilon(1e-12));
  CHECK(kappa(20, cfg) == doctest::Approx(1.0 - 0.85 * 0.25).epsilon(1e-12));
  for (int t = 1; t <= 80; ++t) CHECK(kappa(t, cfg) < kappa(t - 1, cfg));
  CHECK(code_of([&] { kappa(-1, cfg); }) == ErrorCode::invalid_argument);
}

TEST_CASE("exponential guidance shape is available behind the config") {
  RewardConfig cfg;
  cfg.kappa_shape = KappaShape::exponential;
  CHECK(kappa(0, cfg) == 1.0);
  CHECK(kappa(80, cfg) == 0.15);
  CHECK(kappa(160, cfg) == 0.15);  // clamped at the floor past the horizon
  CHECK(kappa(40, cfg) == doctest::Approx(std::pow(0.15, 0.5)).epsilon(1e-12));
  for (int t = 1; t <= 80; ++t) CHECK(kappa(t, cfg) < kappa(t - 1, cfg));
}

TEST_CASE("pose reward scales the tracking score by the annealed weight") {
  RewardConfig cfg;
  CHECK(pose_reward(0, 1.0, cfg) == 0.55);
  CHECK(pose_reward(80, 1.0, cfg) == doctest::Approx(0.55 * 0.15).epsilon(1e-15));
  CHECK(pose_reward(0, 0.5, cfg) == doctest::Approx(0.275).epsilon(1e-15));
}

TEST_CASE("contact indicator uses a closed threshold over the map") {
  const ContactMap map = single_point_map({0.0, 0.0, 0.0});
  RewardConfig cfg;
  std::vector<Eigen::Vector3d> tips = {{0.0, 0.0, 0.0}};
  CHECK(contact_indicator(tips, map, cfg.contact_threshold));
  // The offset is bit-identical to the threshold, so the distance lands
  // exactly on the boundary; the closed comparison must count it.
  tips = {{cfg.contact_threshold, 0.0, 0.0}};
  CHECK(contact_indicator(tips, map, cfg.contact_threshold));
  tips = {{0.0101, 0.0, 0.0}};
  CHECK_FALSE(contact_indicator(tips, map, cfg.contact_threshold));
  // Any single tip suffices.
  tips = {{9, 9, 9}, {0.001, 0.0, 0.0}};
  CHECK(contact_indicator(tips, map, cfg.contact_threshold));
  CHECK(code_of([&] {
          contact_indicator(tips, ContactMap{}, cfg.contact_threshold);
        }) == ErrorCode::assignment);
}

TEST_CASE("contact reward pays only while in contact") {
  RewardConfig cfg;
  CHECK(contact_reward(true, 1.0, cfg) == 0.25);
  CHECK(contact_reward(true, 0.5, cfg) == doctest::Approx(0.125).epsilon(1e-15));
  CHECK(contact_reward(false, 1.0, cfg) == 0.0);
}

TEST_CASE("task terms reflect approach, lift, goal and bonus") {
  RewardConfig cfg;  // table 0.6, bonus radius 0.05, weights 1/1/1/2
  SimStateSnapshot s = zero_snapshot();
  s.object_pos = {0.0, 0.0, 0.6};
  s.goal_pos = s.object_pos;
  s.fingertips = {s.object_pos, s.object_pos};

  SUBCASE("perfect placement earns only the bonus") {
    const TaskTerms t = task_reward(s, cfg);
    CHECK(t.approach == 0.0);
    CHECK(t.lift == 0.0);
    CHECK(t.goal == 0.0);
    CHECK(t.bonus == 2.0);
    CHECK(t.sum() == 2.0);
  }
  SUBCASE("approach penalizes mean tip distance") {
    s.fingertips = {s.object_pos + Eigen::Vector3d(0.02, 0, 0),
                    s.object_pos - Eigen::Vector3d(0.04, 0, 0)};
    const TaskTerms t = task_reward(s, cfg);
    CHECK(t.approach == doctest::Approx(-0.03).epsilon(1e-12));
  }
  SUBCASE("lift pays height above the table only") {
    s.object_pos.z() = 0.9;
    s.goal_pos = s.object_pos;
    s.fingertips = {s.object_pos, s.object_pos};
    CHECK(task_reward(s, cfg).lift == doctest::Approx(0.3).epsilon(1e-12));
    s.object_pos.z() = 0.4;  // below the table: no credit, no penalty
    s.goal_pos = s.object_pos;
    s.fingertips = {s.object_pos, s.object_pos};
    CHECK(task_reward(s, cfg).lift == 0.0);
  }
  SUBCASE("goal distance penalized, bonus strictly inside the radius") {
    s.goal_pos = s.object_pos + Eigen::Vector3d(0.06, 0, 0);
    TaskTerms t = task_reward(s, cfg);
    CHECK(t.goal == doctest::Approx(-0.06).epsilon(1e-12));
    CHECK(t.bonus == 0.0);
    s.goal_pos = s.object_pos + Eigen::Vector3d(0.03, 0, 0);
    t = task_reward(s, cfg);
    CHECK(t.bonus == 2.0);
  }
  SUBCASE("bonus comparison is strict on the boundary") {
    // 0.0625 is a power of two: distance, its square and its square root
    // are all exact, so the boundary case is deterministic.
    RewardConfig edge = cfg;
    edge.bonus_radius = 0.0625;
    s.goal_pos = s.object_pos + Eigen::Vector3d(0.0625, 0, 0);
    CHECK(task_reward(s, edge).bonus == 0.0);
    s.goal_pos = s.object_pos + Eigen::Vector3d(0.0624, 0, 0);
    CHECK(task_reward(s, edge).bonus == 2.0);
  }
  SUBCASE("weights rescale each term") {
    RewardConfig heavy = cfg;
    heavy.weights.approach = 3.0;
    heavy.weights.lift = 2.0;
    heavy.weights.goal = 0.5;
    heavy.weights.bonus = 10.0;
    s.fingertips = {s.object_pos + Eigen::Vector3d(0.01, 0, 0)};
    s.object_pos.z() = 0.7;
    s.goal_pos = s.object_pos + Eigen::Vector3d(0.02, 0, 0);
    // fingertip distance recomputed against the raised object
    s.fingertips = {s.object_pos + Eigen::Vector3d(0.01, 0, 0)};
    const TaskTerms t = task_reward(s, heavy);
    CHECK(t.approach == doctest::Approx(-0.03).epsilon(1e-12));
    CHECK(t.lift == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(t.goal == doctest::Approx(-0.01).epsilon(1e-12));
    CHECK(t.bonus == 10.0);
  }
}

TEST_CASE("reference errors compare against the reference state") {
  RewardConfig cfg;
  SimStateSnapshot s = zero_snapshot(3);
  s.hand.wrist_pos = {0.1, 0.2, 0.3};
  s.reference.wrist_pos = {0.1, 0.1, 0.3};
  s.hand.wrist_rot = {0.0, 0.0, 0.4};
  s.reference.wrist_rot = {0.0, 0.0, 0.1};
  s.hand.joints << 0.5, -0.2, 0.0;
  s.reference.joints << 0.4, 0.0, 0.0;

  Eigen::Vector3d dw, dphi;
  Eigen::VectorXd dtheta;
  reference_errors(s, cfg, dw, dphi, dtheta);
  CHECK((dw - Eigen::Vector3d(0.0, 0.1, 0.0)).norm() <= 1e-15);
  // Rotations about the same axis: the geodesic error is the angle delta.
  CHECK(dphi.norm() == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(dtheta.size() == 3);
  CHECK(dtheta[0] == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(dtheta[1] == doctest::Approx(-0.2).epsilon(1e-12));

  SUBCASE("opposite axis-angle parameters of the same rotation cancel") {
    SimStateSnapshot q = zero_snapshot(2);
    q.hand.wrist_rot = Eigen::Vector3d(0, 0, 1) * M_PI;
    q.reference.wrist_rot = Eigen::Vector3d(0, 0, -1) * M_PI;
    Eigen::Vector3d qdw, qdphi;
    Eigen::VectorXd qdtheta;
    reference_errors(q, cfg, qdw, qdphi, qdtheta);
    CHECK(qdphi.norm() <= 1e-9);
  }
  SUBCASE("joints_only mode ignores the wrist") {
    RewardConfig jcfg = cfg;
    jcfg.reference_mode = ReferenceMode::joints_only;
    reference_errors(s, jcfg, dw, dphi, dtheta);
    CHECK(dw.norm() == 0.0);
    CHECK(dphi.norm() == 0.0);
    CHECK(dtheta[1] == doctest::Approx(-0.2).epsilon(1e-12));
  }
  SUBCASE("joint dimension mismatch") {
    s.reference.joints = Eigen::VectorXd::Zero(5);
    CHECK(code_of([&] {
            reference_errors(s, cfg, dw, dphi, dtheta);
          }) == ErrorCode::dimension_mismatch);
  }
}

TEST_CASE("total reward reconciles with its own breakdown") {
  RewardConfig cfg;
  const ContactMap map = single_point_map({0.0, 0.0, 0.65});
  std::mt19937_64 rng(59);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    SimStateSnapshot s;
    s.timestep = trial % 120;
    s.hand.wrist_pos = Eigen::Vector3d(u(rng), u(rng), u(rng)) * 0.1;
    s.hand.wrist_rot = Eigen::Vector3d(u(rng), u(rng), u(rng)) * 0.5;
    s.hand.joints = Eigen::VectorXd::Zero(4);
    s.reference = s.hand;
    s.reference.wrist_pos += Eigen::Vector3d(u(rng), u(rng), u(rng)) * 0.02;
    s.object_pos = Eigen::Vector3d(u(rng), u(rng), u(rng) + 7) * 0.1;
    s.goal_pos = s.object_pos + Eigen::Vector3d(u(rng), u(rng), u(rng)) * 0.06;
    s.fingertips = {s.object_pos, {0.0, 0.0, 0.65 + 0.009 * u(rng)}};

    const RewardBreakdown b = total_reward(s, map, cfg);
    CHECK(b.total ==
          doctest::Approx(b.pose + b.contact_term + b.task.sum()).epsilon(1e-12));
    CHECK(b.pose == doctest::Approx(cfg.beta_pose * b.kappa * b.track).epsilon(1e-12));
    if (b.contact)
      CHECK(b.contact_term ==
            doctest::Approx(cfg.beta_contact * b.track).epsilon(1e-12));
    else
      CHECK(b.contact_term == 0.0);
    CHECK(b.track > 0.0);
    CHECK(b.track <= 1.0);
  }
}

TEST_CASE("reward breakdown serializes every term") {
  RewardConfig cfg;
  SimStateSnapshot s = zero_snapshot(2);
  s.object_pos = {0, 0, 0.6};
  s.goal_pos = s.object_pos;
  s.fingertips = {{0, 0, 0.6}};
  const ContactMap map = single_point_map({0, 0, 0.6});
  const RewardBreakdown b = total_reward(s, map, cfg);
  const auto doc = nlohmann::json::parse(breakdown_to_json(b));
  CHECK(doc.at("track").get<double>() == b.track);
  CHECK(doc.at("kappa").get<double>() == b.kappa);
  CHECK(doc.at("pose").get<double>() == b.pose);
  CHECK(doc.at("contact").get<bool>() == b.contact);
  CHECK(doc.at("contact_term").get<double>() == b.contact_term);
  CHECK(doc.at("total").get<double>() == b.total);
  CHECK(doc.at("approach").get<double>() == b.task.approach);
  CHECK(doc.at("lift").get<double>() == b.task.lift);
  CHECK(doc.at("goal").get<double>() == b.task.goal);
  CHECK(doc.at("bonus").get<double>() == b.task.bonus);
}

TEST_CASE("reward config validation rejects nonsense") {
  RewardConfig cfg;
  cfg.kappa_floor = 1.5;
  CHECK(code_of([&] { cfg.validate(); }) == ErrorCode::validation);
  cfg = RewardConfig{};
  cfg.kappa_horizon = 0;
  CHECK(code_of([&] { cfg.validate(); }) == ErrorCode::validation);
  cfg = RewardConfig{};
  cfg.contact_threshold = -1;
  CHECK(code_of([&] { cfg.validate(); }) == ErrorCode::validation);
  cfg = RewardConfig{};
  CHECK_FALSE(code_of([&] { cfg.validate(); }).has_value());
}
