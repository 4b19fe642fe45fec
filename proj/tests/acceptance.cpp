// Acceptance gate: runs the end-to-end behavioral checks the library must
// satisfy, prints one PASS/FAIL line per check, and exits with the number of
// failures.  Each check carries a wall-clock budget; exceeding it fails the
// check even when the result is correct.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "graspmap/bundle.hpp"
#include "graspmap/ik.hpp"
#include "graspmap/metrics.hpp"
#include "graspmap/partition.hpp"
#include "graspmap/pipeline.hpp"
#include "graspmap/primitives.hpp"
#include "graspmap/refine.hpp"
#include "graspmap/reward.hpp"
#include "graspmap/synth.hpp"
#include "test_support.hpp"

using namespace graspmap;
namespace fs = std::filesystem;

namespace {

struct Check {
  const char* label;
  double budget_s;
  std::function<bool(std::string&)> body;
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return "<unreadable: " + path.string() + ">";
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "graspmap_acceptance" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// ---------------------------------------------------------------- check 1

bool chord_membership_agrees(std::string& detail) {
  for (const char* shape : {"sphere", "cube", "torus", "dumbbell"}) {
    const auto mesh = geom::make_shape(shape);
    const geom::MeshQuery query(mesh);
    const auto pts = geom::surface_sample(mesh, 2000, 1234);
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<size_t> pick(0, pts.size() - 1);
    const int pairs = 5000;
    int agree = 0;
    for (int i = 0; i < pairs; ++i) {
      const Eigen::Vector3d a = pts[pick(rng)];
      const Eigen::Vector3d b = pts[pick(rng)];
      const bool fast = query.segment_inside(a, b, 16, 1e-3);
      const bool dense = testsup::segment_inside_dense(query, a, b, 1000, 1e-3);
      agree += (fast == dense);
    }
    const double rate = static_cast<double>(agree) / pairs;
    if (rate < 0.99) {
      detail = std::string(shape) + " agreement " + std::to_string(rate);
      return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------- check 2

bool convex_target_keeps_everything(std::string& detail) {
  SynthOptions opts;
  opts.resolution = 64;
  opts.seed = 2;
  const std::string manifest =
      synth_bundle(opts, fresh_dir("acc_convex").string());
  const LoadedScene scene = load_scene(load_bundle(manifest));
  RunOptions ropts;
  ropts.intent = 1;  // whole visible surface of the sphere
  const RunResult res =
      run_pipeline(scene, fresh_dir("acc_convex_out").string(), ropts);
  const auto& d = res.intents.at(0).diagnostics;
  if (d.rejected != 0 || d.accepted != d.candidates ||
      static_cast<long>(res.intents.at(0).map_points) != d.lifted_points) {
    detail = "lifted " + std::to_string(d.lifted_points) + ", map " +
             std::to_string(res.intents.at(0).map_points) + ", rejected " +
             std::to_string(d.rejected);
    return false;
  }
  return d.lifted_points > 0;
}

// ---------------------------------------------------------------- check 3

bool lobe_points_connect_only_via_seeds(std::string& detail) {
  const geom::DumbbellParams params;
  const geom::MeshQuery query(geom::make_dumbbell(params));
  Eigen::Vector3d tip_a, tip_b;
  geom::dumbbell_tips(params, tip_a, tip_b);

  refine::ScoredCloud cloud;
  cloud.points = {tip_a, tip_b};
  cloud.scores = {1.0, 0.9};
  cloud.provenance = {{0, 0, 0}, {0, 1, 0}};
  const refine::RefineConfig cfg;

  // With a single seed, the far lobe's tip has no inside sight-line to it.
  refine::Diagnostics diag;
  const auto one = refine::convexity_expand(cloud, {0}, query, cfg, &diag);
  if (one.points.size() != 1 || diag.rejected != 1) {
    detail = "single-seed expansion kept " + std::to_string(one.points.size());
    return false;
  }
  // Seeding both lobes keeps both, even though the straight line between
  // them leaves the volume: membership is strictly point-to-seed.
  const auto both = refine::convexity_expand(cloud, {0, 1}, query, cfg);
  if (both.points.size() != 2) {
    detail = "two-seed expansion kept " + std::to_string(both.points.size());
    return false;
  }
  if (query.segment_inside(tip_a, tip_b, cfg.convexity_samples,
                           cfg.surface_tol)) {
    detail = "the tip-to-tip chord unexpectedly stays inside";
    return false;
  }
  return true;
}

// ---------------------------------------------------------------- check 4

bool support_requires_mutual_visibility(std::string& detail) {
  const auto fx = testsup::make_two_view_sphere();
  const auto refined = refine::cross_view_refine(fx.input(), {});
  const double gained = refined[0].at(fx.pix_agree.x(), fx.pix_agree.y());
  const double expected = fx.s0 + 0.5 * fx.conf;
  if (std::abs(gained - expected) > 1e-9) {
    detail = "visible pixel " + std::to_string(gained) + " vs " +
             std::to_string(expected);
    return false;
  }
  const double hidden = refined[0].at(fx.pix_occluded.x(), fx.pix_occluded.y());
  if (hidden != fx.s0) {
    detail = "occluded pixel moved to " + std::to_string(hidden);
    return false;
  }
  return true;
}

// ---------------------------------------------------------------- check 5

bool jacobians_match_finite_differences(std::string& detail) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const auto& chain :
       {hand::make_five_finger_hand(), hand::make_four_finger_hand()}) {
    Eigen::VectorXd lower(chain.dof), upper(chain.dof);
    for (const auto& j : chain.joints)
      if (j.revolute) {
        lower[j.dof_index] = j.lower;
        upper[j.dof_index] = j.upper;
      }
    double worst = 0;
    for (int trial = 0; trial < 100; ++trial) {
      hand::HandConfiguration h;
      h.wrist_pos = {u(rng) - 0.5, u(rng) - 0.5, u(rng) - 0.5};
      Eigen::Vector3d axis(u(rng) - 0.5, u(rng) - 0.5, u(rng) - 0.5);
      axis.normalize();
      h.wrist_rot = axis * (u(rng) * 2.5);
      h.joints.resize(chain.dof);
      for (int k = 0; k < chain.dof; ++k)
        h.joints[k] = lower[k] + u(rng) * (upper[k] - lower[k]);

      const Eigen::MatrixXd analytic = hand::fingertip_jacobian(chain, h);
      const Eigen::MatrixXd numeric = testsup::fd_jacobian(chain, h, 1e-6);
      worst = std::max(worst, (analytic - numeric).cwiseAbs().maxCoeff());
    }
    if (worst >= 1e-5) {
      detail = std::to_string(chain.dof) + "-joint hand, max deviation " +
               std::to_string(worst);
      return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------- check 6

bool dls_reaches_reachable_targets(std::string& detail) {
  const auto chain = testsup::planar_two_link(0.10, 0.08);
  const Eigen::Vector3d target = testsup::planar_tip(0.10, 0.08, 0.7, 0.5);

  hand::FingerRegionAssignment assignment;
  assignment.regions = {{target}};

  hand::HandConfiguration h0;
  h0.joints = Eigen::VectorXd::Zero(2);
  h0.joints << 0.1, -0.1;

  hand::IkConfig cfg;
  cfg.iterations = 60;
  cfg.optimize_wrist = false;
  const auto res = hand::solve_ik(chain, h0, assignment, cfg);
  const Eigen::Vector3d tip =
      hand::forward_kinematics(chain, res.configuration)[0];
  if ((tip - target).norm() > 1e-3 || res.objective_trace.back() >= 1e-6) {
    detail = "tip error " + std::to_string((tip - target).norm()) +
             ", objective " + std::to_string(res.objective_trace.back());
    return false;
  }

  hand::IkConfig fixed;
  fixed.iterations = 40;
  fixed.eta = 0.5;
  fixed.reselect_targets = false;
  fixed.optimize_wrist = false;
  const auto trace = hand::solve_ik(chain, h0, assignment, fixed).objective_trace;
  for (size_t i = 1; i < trace.size(); ++i)
    if (trace[i] > trace[i - 1] + 1e-15) {
      detail = "objective rose at step " + std::to_string(i);
      return false;
    }
  return true;
}

// ---------------------------------------------------------------- check 7

bool reward_anchor_values_are_exact(std::string& detail) {
  const RewardConfig cfg;
  if (track_score(Eigen::Vector3d::Zero(), Eigen::Vector3d::Zero(),
                  Eigen::VectorXd::Zero(20), cfg) != 1.0) {
    detail = "perfect tracking is not exactly 1";
    return false;
  }
  if (kappa(0, cfg) != 1.0 || kappa(cfg.kappa_horizon, cfg) != cfg.kappa_floor ||
      kappa(cfg.kappa_horizon + 500, cfg) != cfg.kappa_floor) {
    detail = "guidance decay misses its endpoints";
    return false;
  }
  if (pose_reward(0, 1.0, cfg) != cfg.beta_pose) {
    detail = "pose term at t=0 with perfect tracking is not beta";
    return false;
  }
  if (contact_reward(true, 1.0, cfg) != cfg.beta_contact ||
      contact_reward(false, 1.0, cfg) != 0.0) {
    detail = "contact term is not beta_c times the indicator";
    return false;
  }
  return true;
}

// ---------------------------------------------------------------- check 8

LogRecord acc_record(int t, double obj_x, const Eigen::VectorXd& theta,
                     const Eigen::Vector3d& tip) {
  LogRecord r;
  r.t = t;
  r.object_pos = {obj_x, 0, 0};
  r.goal_pos = {0, 0, 0};
  r.hand.joints = theta;
  r.tips = {tip};
  r.tip_contact = {true};
  return r;
}

EpisodeLog acc_episode(int near, const Eigen::VectorXd& theta, double tip_x) {
  EpisodeLog log;
  const int total = 30;
  for (int t = 0; t < total; ++t)
    log.records.push_back(
        acc_record(t, t >= total - near ? 0.01 : 0.4, theta, {tip_x, 0, 0}));
  return log;
}

bool metrics_match_hand_computation(std::string& detail) {
  ContactMap origin_map;
  origin_map.intent_id = 1;
  origin_map.points = {{0, 0, 0}};
  origin_map.scores = {1.0};

  // Seven successes with controlled contact distances, three failures.
  const std::vector<double> dists = {0.005, 0.01, 0.015, 0.02,
                                     0.03,  0.05, 0.06};
  std::vector<Eigen::VectorXd> thetas;
  for (int i = 0; i < 7; ++i) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(2);
    v[i % 2] = 3.0 * (i + 1);
    thetas.push_back(v);
  }
  std::vector<EpisodeLog> logs;
  std::vector<ContactMap> maps;
  for (int i = 0; i < 7; ++i) {
    logs.push_back(acc_episode(25, thetas[i], dists[i]));
    maps.push_back(origin_map);
  }
  for (int i = 0; i < 3; ++i) {
    logs.push_back(acc_episode(3, Eigen::VectorXd::Zero(2), 0.5));
    maps.push_back(origin_map);
  }

  if (gsr(logs) != 7.0 / 10.0) {
    detail = "gsr " + std::to_string(gsr(logs));
    return false;
  }

  MetricsConfig cfg;
  double sad_sum = 0;
  for (double d : dists) sad_sum += std::sqrt(d * d);
  const auto m = msad(logs, maps, cfg);
  if (!m || *m != sad_sum / 7) {
    detail = "msad deviates from the hand-computed mean";
    return false;
  }

  int under = 0;
  for (double d : dists) under += (std::sqrt(d * d) < cfg.isr_threshold);
  if (isr(logs, maps, cfg) != static_cast<double>(under) / 10.0) {
    detail = "isr " + std::to_string(isr(logs, maps, cfg));
    return false;
  }

  double pair_sum = 0;
  size_t pairs = 0;
  for (size_t a = 0; a < thetas.size(); ++a)
    for (size_t b = a + 1; b < thetas.size(); ++b) {
      pair_sum += (thetas[a] - thetas[b]).norm();
      ++pairs;
    }
  if (style_diversity(logs) != pair_sum / static_cast<double>(pairs)) {
    detail = "style diversity deviates from the pairwise mean";
    return false;
  }

  // Boundary behavior: the hold count is exact and the radius is strict.
  if (episode_success(acc_episode(19, thetas[0], 0.01)) ||
      !episode_success(acc_episode(20, thetas[0], 0.01))) {
    detail = "hold-count boundary off by one";
    return false;
  }
  EpisodeLog on_radius = acc_episode(25, thetas[0], 0.01);
  for (auto& r : on_radius.records) r.object_pos = {0.0625, 0, 0};
  if (episode_success(on_radius, 0.0625, 20)) {
    detail = "a distance equal to the radius was counted as inside";
    return false;
  }
  MetricsConfig strict = cfg;
  strict.isr_threshold = 0.03125;
  std::vector<EpisodeLog> one = {acc_episode(25, thetas[0], 0.03125)};
  std::vector<ContactMap> one_map = {origin_map};
  if (isr(one, one_map, strict) != 0.0) {
    detail = "a sad equal to the threshold was counted";
    return false;
  }

  // Randomized property: the intent-aligned rate can never beat the raw rate.
  std::mt19937_64 rng(4242);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int set = 0; set < 1000; ++set) {
    const int n = 1 + static_cast<int>(u(rng) * 14);
    std::vector<EpisodeLog> rl;
    std::vector<ContactMap> rm;
    for (int e = 0; e < n; ++e) {
      rl.push_back(acc_episode(static_cast<int>(u(rng) * 30),
                               Eigen::VectorXd::Zero(2), 0.08 * u(rng)));
      rm.push_back(origin_map);
    }
    if (isr(rl, rm, cfg) > gsr(rl)) {
      detail = "isr exceeded gsr on randomized set " + std::to_string(set);
      return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------- check 9

bool coverage_splits_shell_points(std::string& detail) {
  const auto mesh = geom::make_sphere(0.05, 3);
  const geom::MeshQuery query(mesh);
  std::mt19937_64 rng(31);
  std::normal_distribution<double> n;
  std::vector<Eigen::Vector3d> pts;
  auto shell = [&](double offset, int count) {
    for (int i = 0; i < count; ++i) {
      Eigen::Vector3d d(n(rng), n(rng), n(rng));
      d.normalize();
      pts.push_back(d * (0.05 + ((i % 2) ? offset : -offset)));
    }
  };
  shell(0.004, 200);
  shell(0.010, 200);
  const double mid = coverage(pts, query, 0.005);
  const double tight = coverage(pts, query, 0.002);
  if (mid != 50.0 || tight != 0.0) {
    detail = "coverage " + std::to_string(mid) + " at 5mm, " +
             std::to_string(tight) + " at 2mm";
    return false;
  }
  return true;
}

// --------------------------------------------------------------- check 10

bool pipeline_is_reproducible(std::string& detail) {
  SynthOptions opts;
  opts.resolution = 64;
  opts.seed = 9;
  const std::string manifest =
      synth_bundle(opts, fresh_dir("acc_repro").string());
  const LoadedScene scene = load_scene(load_bundle(manifest));
  const fs::path a = fresh_dir("acc_repro_a");
  const fs::path b = fresh_dir("acc_repro_b");
  run_pipeline(scene, a.string());
  run_pipeline(scene, b.string());
  for (const char* name : {"contact_map_1.json", "contact_map_2.json",
                           "pose_1.json", "pose_2.json"}) {
    if (slurp(a / name) != slurp(b / name)) {
      detail = std::string(name) + " differs between runs";
      return false;
    }
  }
  return true;
}

// --------------------------------------------------------------- check 11

bool retargeting_stays_interactive(std::string& detail) {
  const auto mesh = geom::make_sphere(0.05, 3);
  const geom::MeshQuery query(mesh);
  refine::ContactMap map;
  map.intent_id = 1;
  map.points = geom::surface_sample(mesh, 5000, 77);
  map.scores.assign(map.points.size(), 1.0);
  map.seed_indices = {0};

  const auto chain = hand::make_five_finger_hand();
  const auto h0 = hand::default_initial_pose(chain, map, &query);
  const auto assignment = hand::partition_regions(map, chain);

  const auto start = std::chrono::steady_clock::now();
  const auto res = hand::solve_ik(chain, h0, assignment);
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  if (elapsed >= 1.0) {
    detail = "solve took " + std::to_string(elapsed) + "s";
    return false;
  }
  return res.objective_trace.size() == 13;
}

}  // namespace

int main() {
  const std::vector<Check> checks = {
      {"16-sample chord membership matches a 1000-sample sweep (>=99%)", 60.0,
       chord_membership_agrees},
      {"a convex target accepts every lifted candidate", 10.0,
       convex_target_keeps_everything},
      {"expansion is strictly seed-pairwise on a two-lobe shape", 5.0,
       lobe_points_connect_only_via_seeds},
      {"cross-view support needs mask and depth agreement", 10.0,
       support_requires_mutual_visibility},
      {"fingertip jacobians match central differences (<1e-5)", 30.0,
       jacobians_match_finite_differences},
      {"damped least squares reaches a reachable planar target", 5.0,
       dls_reaches_reachable_targets},
      {"reward anchor values are exact", 1.0, reward_anchor_values_are_exact},
      {"episode metrics agree with hand-computed values", 30.0,
       metrics_match_hand_computation},
      {"coverage splits shell points exactly at the tolerance", 5.0,
       coverage_splits_shell_points},
      {"two pipeline runs produce identical bytes", 60.0,
       pipeline_is_reproducible},
      {"default retargeting finishes within one second", 5.0,
       retargeting_stays_interactive},
  };

  int failures = 0;
  for (size_t i = 0; i < checks.size(); ++i) {
    const auto& check = checks[i];
    std::string detail;
    bool ok = false;
    const auto start = std::chrono::steady_clock::now();
    try {
      ok = check.body(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    if (ok && elapsed > check.budget_s) {
      ok = false;
      detail = "over the " + std::to_string(check.budget_s) + "s budget";
    }
    std::printf("%s %2zu/%zu %s (%.2fs)%s%s\n", ok ? "PASS" : "FAIL", i + 1,
                checks.size(), check.label, elapsed, detail.empty() ? "" : ": ",
                detail.c_str());
    failures += !ok;
  }
  std::printf("%d of %zu checks passed\n",
              static_cast<int>(checks.size()) - failures, checks.size());
  return failures;
}
