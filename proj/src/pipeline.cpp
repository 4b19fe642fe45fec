#include "graspmap/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>

#include "json.hpp"

#include "graspmap/episode_log.hpp"
#include "graspmap/error.hpp"
#include "graspmap/ik.hpp"
#include "graspmap/partition.hpp"

namespace graspmap {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {
void run_intents(const LoadedScene& scene, const RunOptions& opts,
                 const refine::RefineConfig& refine_cfg,
                 const geom::MeshQuery& object, const fs::path& stage,
                 RunResult& result, json& diag_intents);
}  // namespace

RunResult run_pipeline(const LoadedScene& scene, const std::string& out_dir,
                       const RunOptions& opts) {
  fs::create_directories(out_dir);
  const fs::path stage = fs::path(out_dir) / ".stage";
  fs::remove_all(stage);
  fs::create_directories(stage);

  refine::RefineConfig refine_cfg = scene.config.refine;
  if (opts.threads > 0) refine_cfg.threads = opts.threads;

  const geom::MeshQuery object(scene.mesh);
  RunResult result;
  json diag_intents = json::array();

  try {
    run_intents(scene, opts, refine_cfg, object, stage, result, diag_intents);
  } catch (...) {
    fs::remove_all(stage);  // a failed run must leave no partial output
    throw;
  }

  if (result.intents.empty()) {
    fs::remove_all(stage);
    if (opts.intent)
      fail(ErrorCode::invalid_argument,
           "intent " + std::to_string(*opts.intent) + " not found in bundle");
    fail(ErrorCode::empty_input, "bundle has no intents");
  }

  json diag;
  diag["object_id"] = scene.object_id;
  diag["intents"] = diag_intents;
  result.diagnostics_file = "diagnostics.json";
  {
    std::ofstream out(stage / result.diagnostics_file, std::ios::binary);
    if (!out) fail(ErrorCode::io, "cannot write diagnostics.json");
    out << diag.dump(2) << "\n";
  }

  // Everything succeeded; move the staged files into place.
  std::vector<fs::path> staged;
  for (const auto& entry : fs::directory_iterator(stage))
    staged.push_back(entry.path());
  std::sort(staged.begin(), staged.end());
  for (const auto& p : staged)
    fs::rename(p, fs::path(out_dir) / p.filename());
  fs::remove_all(stage);
  return result;
}

namespace {

void run_intents(const LoadedScene& scene, const RunOptions& opts,
                 const refine::RefineConfig& refine_cfg,
                 const geom::MeshQuery& object, const fs::path& stage,
                 RunResult& result, json& diag_intents) {
  for (size_t i = 0; i < scene.intents.size(); ++i) {
    const auto& intent = scene.intents[i];
    if (opts.intent && *opts.intent != intent.intent_id) continue;

    // Filtered masks must stay alive behind the pointers handed to refine.
    std::vector<geom::MaskImage> filtered;
    filtered.reserve(scene.views.size());
    refine::IntentViews input;
    for (size_t v = 0; v < scene.views.size(); ++v) {
      if (!scene.masks[i][v]) continue;
      const auto& view = scene.views[v];
      const ingest::ViewProposal* vp = intent.view(view.view_id);
      if (!vp) continue;
      filtered.push_back(ingest::filter_mask(*scene.masks[i][v], view.depth));
      const double ratio = ingest::valid_region_ratio(filtered.back(), vp->bbox);
      const double calibrated = ingest::calibrate_confidence(
          vp->confidence, ratio, scene.config.calibration);
      input.views.push_back(&view);
      input.calibrated_confidence.push_back(calibrated);
      input.initial_maps.push_back(
          ingest::init_confidence_map(filtered.back(), calibrated));
    }
    for (const auto& mask : filtered) input.masks.push_back(&mask);
    if (input.views.empty())
      fail(ErrorCode::empty_input,
           "intent " + std::to_string(intent.intent_id) + " has no usable views");

    IntentRunSummary summary;
    summary.intent_id = intent.intent_id;
    const auto map = refine::build_contact_map(intent.intent_id, input, object,
                                               refine_cfg, &summary.diagnostics);
    summary.map_points = map.points.size();

    const auto h0 = hand::default_initial_pose(scene.chain, map, &object,
                                               scene.config.initial_pose);
    hand::PartitionOptions popts;
    popts.thumb_side = scene.config.thumb_side;
    popts.wrist_rotation = hand::rotation_exp(h0.wrist_rot);
    const auto assignment = hand::partition_regions(map, scene.chain, popts);
    const auto ik = hand::solve_ik(scene.chain, h0, assignment, scene.config.ik);
    summary.final_objective = ik.objective_trace.back();

    const std::string tag = std::to_string(intent.intent_id);
    summary.map_file = "contact_map_" + tag + ".json";
    summary.ply_file = "contact_map_" + tag + ".ply";
    summary.pose_file = "pose_" + tag + ".json";
    refine::save_contact_map(map, (stage / summary.map_file).string());
    refine::save_contact_map_ply(map, (stage / summary.ply_file).string());
    hand::PseudoPose pose;
    pose.intent_id = intent.intent_id;
    pose.configuration = ik.configuration;
    pose.objective_trace = ik.objective_trace;
    hand::save_pose(pose, (stage / summary.pose_file).string());

    json d;
    d["intent_id"] = intent.intent_id;
    d["views_used"] = input.views.size();
    d["mask_pixels"] = summary.diagnostics.mask_pixels;
    d["supported_pixels"] = summary.diagnostics.supported_pixels;
    d["max_support"] = summary.diagnostics.max_support;
    d["lifted_points"] = summary.diagnostics.lifted_points;
    d["skipped_no_depth"] = summary.diagnostics.skipped_no_depth;
    d["seeds_selected"] = summary.diagnostics.seeds_selected;
    d["seeds_after_component"] = summary.diagnostics.seeds_after_component;
    d["candidates"] = summary.diagnostics.candidates;
    d["accepted"] = summary.diagnostics.accepted;
    d["rejected"] = summary.diagnostics.rejected;
    d["off_surface"] = summary.diagnostics.off_surface;
    d["map_points"] = summary.map_points;
    d["final_objective"] = summary.final_objective;
    diag_intents.push_back(d);

    result.intents.push_back(std::move(summary));
  }
}

}  // namespace

EvalReport evaluate_directory(const std::string& logs_dir,
                              const std::string& maps_dir,
                              const PipelineConfig& cfg,
                              const std::string& config_dir) {
  if (!fs::is_directory(logs_dir))
    fail(ErrorCode::io, "not a directory: " + logs_dir);
  std::vector<fs::path> log_paths;
  for (const auto& entry : fs::directory_iterator(logs_dir))
    if (entry.is_regular_file() && entry.path().extension() == ".jsonl")
      log_paths.push_back(entry.path());
  std::sort(log_paths.begin(), log_paths.end());
  if (log_paths.empty())
    fail(ErrorCode::empty_input, "no .jsonl episode logs in " + logs_dir);

  std::vector<EpisodeLog> logs;
  for (const auto& p : log_paths) logs.push_back(load_episode_log(p.string()));

  // One contact map per episode, keyed by the log's intent id.
  std::map<std::string, refine::ContactMap> cache;
  auto map_for = [&](const std::string& intent) -> const refine::ContactMap& {
    auto it = cache.find(intent);
    if (it != cache.end()) return it->second;
    fs::path path;
    if (intent.empty()) {
      std::vector<fs::path> found;
      for (const auto& entry : fs::directory_iterator(maps_dir)) {
        const std::string name = entry.path().filename().string();
        if (name.rfind("contact_map_", 0) == 0 &&
            entry.path().extension() == ".json")
          found.push_back(entry.path());
      }
      if (found.size() != 1)
        fail(ErrorCode::invalid_argument,
             "log names no intent and " + maps_dir + " holds " +
                 std::to_string(found.size()) + " contact maps");
      path = found.front();
    } else {
      path = fs::path(maps_dir) / ("contact_map_" + intent + ".json");
      if (!fs::exists(path))
        fail(ErrorCode::io, "contact map not found: " + path.string());
    }
    auto [pos, _] = cache.emplace(intent, refine::load_contact_map(path.string()));
    return pos->second;
  };

  std::vector<refine::ContactMap> maps;
  for (const auto& log : logs) maps.push_back(map_for(log.intent_id));

  std::optional<geom::MeshQuery> object;
  if (!cfg.object_mesh.empty()) {
    fs::path mesh_path(cfg.object_mesh);
    if (mesh_path.is_relative()) mesh_path = fs::path(config_dir) / mesh_path;
    object.emplace(geom::load_obj(mesh_path.string()));
  }

  return evaluate(logs, maps, cfg.metrics, object ? &*object : nullptr);
}

}  // namespace graspmap
