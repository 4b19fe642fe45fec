#include "graspmap/config.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>

#include "json.hpp"

#include "graspmap/error.hpp"

namespace graspmap {

using json = nlohmann::ordered_json;

namespace {

void reject_unknown(const json& j, const char* where,
                    std::initializer_list<const char*> allowed) {
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* key : allowed)
      if (item.key() == key) {
        known = true;
        break;
      }
    if (!known)
      fail(ErrorCode::parse,
           std::string("config: unknown key '") + item.key() + "' in " + where);
  }
}

template <typename T>
void get_if(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j[key].get<T>();
}

}  // namespace

void PipelineConfig::validate() const {
  auto require = [](bool ok, const char* msg) {
    if (!ok) fail(ErrorCode::validation, std::string("config: ") + msg);
  };
  require(!chain_path.empty(), "chain path is empty");
  require(refine.alpha > 0, "alpha must be > 0");
  require(refine.tau > 0, "tau must be > 0");
  require(refine.seed_fraction > 0 && refine.seed_fraction <= 1,
          "seed_fraction must be in (0, 1]");
  require(refine.convexity_samples >= 2, "convexity_samples must be >= 2");
  require(refine.surface_tol >= 0, "surface_tol must be >= 0");
  require(refine.seed_component_radius >= 0,
          "seed_component_radius must be >= 0");
  require(refine.pair_distance_cutoff >= 0,
          "pair_distance_cutoff must be >= 0");
  require(refine.threads >= 1, "threads must be >= 1");
  require(ik.iterations >= 1, "ik iterations must be >= 1");
  require(ik.lambda_dls > 0, "lambda_dls must be > 0");
  require(ik.eta > 0, "eta must be > 0");
  require(initial_pose.standoff > 0, "standoff must be > 0");
  require(thumb_side == -1 || thumb_side == 0 || thumb_side == 1,
          "thumb_side must be -1, 0, or 1");
  reward.validate();
  metrics.validate();
}

PipelineConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::parse, std::string("config: ") + e.what());
  }
  if (!j.is_object()) fail(ErrorCode::parse, "config: not an object");
  reject_unknown(j, "config",
                 {"chain", "refine", "ik", "reward", "metrics", "object_mesh"});

  PipelineConfig cfg;
  get_if(j, "chain", cfg.chain_path);
  get_if(j, "object_mesh", cfg.object_mesh);

  if (j.contains("refine")) {
    const json& r = j["refine"];
    reject_unknown(r, "refine",
                   {"alpha", "tau", "seed_fraction", "neighbors",
                    "convexity_samples", "surface_tol", "seed_component",
                    "seed_component_radius", "pair_distance_cutoff", "threads",
                    "calibration"});
    get_if(r, "alpha", cfg.refine.alpha);
    get_if(r, "tau", cfg.refine.tau);
    get_if(r, "seed_fraction", cfg.refine.seed_fraction);
    if (r.contains("neighbors")) {
      const std::string mode = r["neighbors"].get<std::string>();
      if (mode == "all")
        cfg.refine.neighbors = refine::RefineConfig::NeighborPolicy::all_views;
      else if (mode == "ring")
        cfg.refine.neighbors = refine::RefineConfig::NeighborPolicy::ring_adjacent;
      else
        fail(ErrorCode::parse, "config: neighbors must be 'all' or 'ring'");
    }
    get_if(r, "convexity_samples", cfg.refine.convexity_samples);
    get_if(r, "surface_tol", cfg.refine.surface_tol);
    get_if(r, "seed_component", cfg.refine.seed_component);
    get_if(r, "seed_component_radius", cfg.refine.seed_component_radius);
    get_if(r, "pair_distance_cutoff", cfg.refine.pair_distance_cutoff);
    get_if(r, "threads", cfg.refine.threads);
    if (r.contains("calibration")) {
      const json& c = r["calibration"];
      reject_unknown(c, "calibration", {"scale", "bias"});
      get_if(c, "scale", cfg.calibration.scale);
      get_if(c, "bias", cfg.calibration.bias);
    }
  }

  if (j.contains("ik")) {
    const json& k = j["ik"];
    reject_unknown(k, "ik",
                   {"iterations", "lambda_dls", "eta", "reselect_targets",
                    "optimize_wrist", "standoff", "thumb_side"});
    get_if(k, "iterations", cfg.ik.iterations);
    get_if(k, "lambda_dls", cfg.ik.lambda_dls);
    get_if(k, "eta", cfg.ik.eta);
    get_if(k, "reselect_targets", cfg.ik.reselect_targets);
    get_if(k, "optimize_wrist", cfg.ik.optimize_wrist);
    get_if(k, "standoff", cfg.initial_pose.standoff);
    get_if(k, "thumb_side", cfg.thumb_side);
  }

  if (j.contains("reward")) {
    const json& r = j["reward"];
    reject_unknown(r, "reward",
                   {"lambda_w", "lambda_phi", "lambda_theta", "beta", "beta_c",
                    "kappa_horizon", "kappa_floor", "kappa_shape",
                    "contact_threshold", "weights", "bonus_radius",
                    "table_height", "reference_mode"});
    get_if(r, "lambda_w", cfg.reward.lambda_w);
    get_if(r, "lambda_phi", cfg.reward.lambda_phi);
    get_if(r, "lambda_theta", cfg.reward.lambda_theta);
    get_if(r, "beta", cfg.reward.beta_pose);
    get_if(r, "beta_c", cfg.reward.beta_contact);
    get_if(r, "kappa_horizon", cfg.reward.kappa_horizon);
    get_if(r, "kappa_floor", cfg.reward.kappa_floor);
    if (r.contains("kappa_shape")) {
      const std::string shape = r["kappa_shape"].get<std::string>();
      if (shape == "linear")
        cfg.reward.kappa_shape = KappaShape::linear;
      else if (shape == "exponential")
        cfg.reward.kappa_shape = KappaShape::exponential;
      else
        fail(ErrorCode::parse,
             "config: kappa_shape must be 'linear' or 'exponential'");
    }
    get_if(r, "contact_threshold", cfg.reward.contact_threshold);
    if (r.contains("weights")) {
      const json& w = r["weights"];
      reject_unknown(w, "weights", {"approach", "lift", "goal", "bonus"});
      get_if(w, "approach", cfg.reward.weights.approach);
      get_if(w, "lift", cfg.reward.weights.lift);
      get_if(w, "goal", cfg.reward.weights.goal);
      get_if(w, "bonus", cfg.reward.weights.bonus);
    }
    get_if(r, "bonus_radius", cfg.reward.bonus_radius);
    get_if(r, "table_height", cfg.reward.table_height);
    if (r.contains("reference_mode")) {
      const std::string mode = r["reference_mode"].get<std::string>();
      if (mode == "full_state")
        cfg.reward.reference_mode = ReferenceMode::full_state;
      else if (mode == "joints_only")
        cfg.reward.reference_mode = ReferenceMode::joints_only;
      else
        fail(ErrorCode::parse,
             "config: reference_mode must be 'full_state' or 'joints_only'");
    }
  }

  if (j.contains("metrics")) {
    const json& m = j["metrics"];
    reject_unknown(m, "metrics",
                   {"success_radius", "success_hold", "sad_aggregation",
                    "isr_threshold", "contact_threshold", "coverage_taus"});
    get_if(m, "success_radius", cfg.metrics.success_radius);
    get_if(m, "success_hold", cfg.metrics.success_hold);
    if (m.contains("sad_aggregation")) {
      const std::string agg = m["sad_aggregation"].get<std::string>();
      if (agg == "mean")
        cfg.metrics.sad_aggregation = SadAggregation::mean;
      else if (agg == "min")
        cfg.metrics.sad_aggregation = SadAggregation::min;
      else
        fail(ErrorCode::parse, "config: sad_aggregation must be 'mean' or 'min'");
    }
    get_if(m, "isr_threshold", cfg.metrics.isr_threshold);
    get_if(m, "contact_threshold", cfg.metrics.contact_threshold);
    get_if(m, "coverage_taus", cfg.metrics.coverage_taus);
  }

  cfg.validate();
  return cfg;
}

std::string config_to_json(const PipelineConfig& cfg) {
  json j;
  j["chain"] = cfg.chain_path;
  if (!cfg.object_mesh.empty()) j["object_mesh"] = cfg.object_mesh;

  json r;
  r["alpha"] = cfg.refine.alpha;
  r["tau"] = cfg.refine.tau;
  r["seed_fraction"] = cfg.refine.seed_fraction;
  r["neighbors"] =
      cfg.refine.neighbors == refine::RefineConfig::NeighborPolicy::all_views
          ? "all"
          : "ring";
  r["convexity_samples"] = cfg.refine.convexity_samples;
  r["surface_tol"] = cfg.refine.surface_tol;
  r["seed_component"] = cfg.refine.seed_component;
  r["seed_component_radius"] = cfg.refine.seed_component_radius;
  r["pair_distance_cutoff"] = cfg.refine.pair_distance_cutoff;
  r["threads"] = cfg.refine.threads;
  r["calibration"] = json{{"scale", cfg.calibration.scale},
                          {"bias", cfg.calibration.bias}};
  j["refine"] = r;

  json k;
  k["iterations"] = cfg.ik.iterations;
  k["lambda_dls"] = cfg.ik.lambda_dls;
  k["eta"] = cfg.ik.eta;
  k["reselect_targets"] = cfg.ik.reselect_targets;
  k["optimize_wrist"] = cfg.ik.optimize_wrist;
  k["standoff"] = cfg.initial_pose.standoff;
  k["thumb_side"] = cfg.thumb_side;
  j["ik"] = k;

  json rw;
  rw["lambda_w"] = cfg.reward.lambda_w;
  rw["lambda_phi"] = cfg.reward.lambda_phi;
  rw["lambda_theta"] = cfg.reward.lambda_theta;
  rw["beta"] = cfg.reward.beta_pose;
  rw["beta_c"] = cfg.reward.beta_contact;
  rw["kappa_horizon"] = cfg.reward.kappa_horizon;
  rw["kappa_floor"] = cfg.reward.kappa_floor;
  rw["kappa_shape"] =
      cfg.reward.kappa_shape == KappaShape::linear ? "linear" : "exponential";
  rw["contact_threshold"] = cfg.reward.contact_threshold;
  rw["weights"] = json{{"approach", cfg.reward.weights.approach},
                       {"lift", cfg.reward.weights.lift},
                       {"goal", cfg.reward.weights.goal},
                       {"bonus", cfg.reward.weights.bonus}};
  rw["bonus_radius"] = cfg.reward.bonus_radius;
  rw["table_height"] = cfg.reward.table_height;
  rw["reference_mode"] = cfg.reward.reference_mode == ReferenceMode::full_state
                             ? "full_state"
                             : "joints_only";
  j["reward"] = rw;

  json m;
  m["success_radius"] = cfg.metrics.success_radius;
  m["success_hold"] = cfg.metrics.success_hold;
  m["sad_aggregation"] =
      cfg.metrics.sad_aggregation == SadAggregation::mean ? "mean" : "min";
  m["isr_threshold"] = cfg.metrics.isr_threshold;
  m["contact_threshold"] = cfg.metrics.contact_threshold;
  m["coverage_taus"] = cfg.metrics.coverage_taus;
  j["metrics"] = m;

  return j.dump(2) + "\n";
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open config: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return config_from_json(buf.str());
  } catch (const Error& e) {
    fail(e.code(), path + ": " + e.what());
  }
}

void save_config(const PipelineConfig& cfg, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::io, "cannot write config: " + path);
  out << config_to_json(cfg);
  if (!out) fail(ErrorCode::io, "write failed: " + path);
}

std::string default_config_json() { return config_to_json(PipelineConfig{}); }

}  // namespace graspmap
