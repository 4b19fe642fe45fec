#include "graspmap/capi.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <string>

#include "graspmap/bundle.hpp"
#include "graspmap/chain.hpp"
#include "graspmap/config.hpp"
#include "graspmap/error.hpp"
#include "graspmap/ik.hpp"
#include "graspmap/kinematics.hpp"
#include "graspmap/mesh_query.hpp"
#include "graspmap/partition.hpp"
#include "graspmap/pipeline.hpp"
#include "graspmap/primitives.hpp"
#include "graspmap/refine.hpp"
#include "graspmap/synth.hpp"

using namespace graspmap;

namespace {

thread_local std::string g_last_error;

gm_status status_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return GM_ERR_INVALID_ARGUMENT;
    case ErrorCode::out_of_bounds: return GM_ERR_OUT_OF_BOUNDS;
    case ErrorCode::invalid_depth: return GM_ERR_INVALID_DEPTH;
    case ErrorCode::behind_camera: return GM_ERR_BEHIND_CAMERA;
    case ErrorCode::shape_mismatch: return GM_ERR_SHAPE_MISMATCH;
    case ErrorCode::dimension_mismatch: return GM_ERR_DIMENSION_MISMATCH;
    case ErrorCode::topology: return GM_ERR_TOPOLOGY;
    case ErrorCode::parse: return GM_ERR_PARSE;
    case ErrorCode::io: return GM_ERR_IO;
    case ErrorCode::empty_input: return GM_ERR_EMPTY_INPUT;
    case ErrorCode::degenerate_geometry: return GM_ERR_DEGENERATE_GEOMETRY;
    case ErrorCode::missing_depth: return GM_ERR_MISSING_DEPTH;
    case ErrorCode::assignment: return GM_ERR_ASSIGNMENT;
    case ErrorCode::missing_contact: return GM_ERR_MISSING_CONTACT;
    case ErrorCode::insufficient_data: return GM_ERR_INSUFFICIENT_DATA;
    case ErrorCode::numeric: return GM_ERR_NUMERIC;
    case ErrorCode::validation: return GM_ERR_VALIDATION;
  }
  return GM_ERR_UNKNOWN;
}

// Runs the body, translating exceptions into statuses.
template <typename Fn>
gm_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return GM_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return GM_ERR_UNKNOWN;
  } catch (...) {
    g_last_error = "unknown failure";
    return GM_ERR_UNKNOWN;
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void require(bool ok, const char* what) {
  if (!ok) fail(ErrorCode::invalid_argument, what);
}

}  // namespace

struct gm_mesh {
  geom::MeshQuery query;
  explicit gm_mesh(const geom::TriangleMesh& m) : query(m) {}
};

struct gm_chain {
  hand::KinematicChain chain;
};

struct gm_contact_map {
  refine::ContactMap map;
};

extern "C" {

const char* gm_version(void) { return "0.1.0"; }

const char* gm_last_error(void) { return g_last_error.c_str(); }

void gm_string_free(char* s) { std::free(s); }

gm_status gm_mesh_load(const char* path, gm_mesh** out) {
  return guarded([&] {
    require(path && out, "gm_mesh_load: null argument");
    *out = new gm_mesh(geom::load_obj(path));
  });
}

gm_status gm_mesh_make(const char* shape, gm_mesh** out) {
  return guarded([&] {
    require(shape && out, "gm_mesh_make: null argument");
    *out = new gm_mesh(geom::make_shape(shape));
  });
}

void gm_mesh_free(gm_mesh* mesh) { delete mesh; }

gm_status gm_mesh_contains(const gm_mesh* mesh, const double point[3],
                           int* inside) {
  return guarded([&] {
    require(mesh && point && inside, "gm_mesh_contains: null argument");
    *inside = mesh->query.contains_point({point[0], point[1], point[2]}) ? 1 : 0;
  });
}

gm_status gm_mesh_signed_distance(const gm_mesh* mesh, const double point[3],
                                  double* distance) {
  return guarded([&] {
    require(mesh && point && distance, "gm_mesh_signed_distance: null argument");
    *distance = mesh->query.signed_distance({point[0], point[1], point[2]});
  });
}

gm_status gm_mesh_segment_inside(const gm_mesh* mesh, const double a[3],
                                 const double b[3], int samples,
                                 double surface_tol, int* inside) {
  return guarded([&] {
    require(mesh && a && b && inside, "gm_mesh_segment_inside: null argument");
    *inside = mesh->query.segment_inside({a[0], a[1], a[2]}, {b[0], b[1], b[2]},
                                         samples, surface_tol)
                  ? 1
                  : 0;
  });
}

gm_status gm_chain_load(const char* path, gm_chain** out) {
  return guarded([&] {
    require(path && out, "gm_chain_load: null argument");
    *out = new gm_chain{hand::load_chain(path)};
  });
}

gm_status gm_chain_builtin(const char* name, gm_chain** out) {
  return guarded([&] {
    require(name && out, "gm_chain_builtin: null argument");
    const std::string which(name);
    if (which == "five_finger")
      *out = new gm_chain{hand::make_five_finger_hand()};
    else if (which == "four_finger")
      *out = new gm_chain{hand::make_four_finger_hand()};
    else
      fail(ErrorCode::invalid_argument,
           "gm_chain_builtin: unknown chain '" + which + "'");
  });
}

void gm_chain_free(gm_chain* chain) { delete chain; }

int gm_chain_dof(const gm_chain* chain) { return chain ? chain->chain.dof : 0; }

int gm_chain_fingertip_count(const gm_chain* chain) {
  return chain ? static_cast<int>(chain->chain.fingertips.size()) : 0;
}

gm_status gm_chain_fingertips(const gm_chain* chain, const double wrist_pos[3],
                              const double wrist_rot[3], const double* joints,
                              size_t joint_count, double* tips_xyz) {
  return guarded([&] {
    require(chain && wrist_pos && wrist_rot && joints && tips_xyz,
            "gm_chain_fingertips: null argument");
    hand::HandConfiguration h;
    h.wrist_pos = {wrist_pos[0], wrist_pos[1], wrist_pos[2]};
    h.wrist_rot = {wrist_rot[0], wrist_rot[1], wrist_rot[2]};
    h.joints = Eigen::Map<const Eigen::VectorXd>(
        joints, static_cast<Eigen::Index>(joint_count));
    const auto tips = hand::forward_kinematics(chain->chain, h);
    for (size_t i = 0; i < tips.size(); ++i) {
      tips_xyz[3 * i + 0] = tips[i].x();
      tips_xyz[3 * i + 1] = tips[i].y();
      tips_xyz[3 * i + 2] = tips[i].z();
    }
  });
}

gm_status gm_contact_map_load(const char* path, gm_contact_map** out) {
  return guarded([&] {
    require(path && out, "gm_contact_map_load: null argument");
    *out = new gm_contact_map{refine::load_contact_map(path)};
  });
}

void gm_contact_map_free(gm_contact_map* map) { delete map; }

size_t gm_contact_map_size(const gm_contact_map* map) {
  return map ? map->map.points.size() : 0;
}

gm_status gm_contact_map_point(const gm_contact_map* map, size_t index,
                               double point[3], double* score) {
  return guarded([&] {
    require(map && point, "gm_contact_map_point: null argument");
    if (index >= map->map.points.size())
      fail(ErrorCode::out_of_bounds, "gm_contact_map_point: index " +
                                         std::to_string(index) + " of " +
                                         std::to_string(map->map.points.size()));
    const auto& p = map->map.points[index];
    point[0] = p.x();
    point[1] = p.y();
    point[2] = p.z();
    if (score) *score = map->map.scores[index];
  });
}

gm_status gm_default_config(char** config_json) {
  return guarded([&] {
    require(config_json, "gm_default_config: null argument");
    *config_json = dup_string(default_config_json());
  });
}

gm_status gm_synth(const char* shape, int resolution, uint64_t seed,
                   const char* out_dir) {
  return guarded([&] {
    require(shape && out_dir, "gm_synth: null argument");
    SynthOptions opts;
    opts.shape = shape;
    opts.resolution = resolution;
    opts.seed = seed;
    synth_bundle(opts, out_dir);
  });
}

gm_status gm_validate(const char* bundle_path, char** report_json, int* errors,
                      int* warnings) {
  return guarded([&] {
    require(bundle_path, "gm_validate: null argument");
    const auto bundle = load_bundle(bundle_path);
    const auto report = validate_bundle(bundle);
    if (report_json) *report_json = dup_string(report.to_json());
    if (errors) *errors = report.errors();
    if (warnings) *warnings = report.warnings();
  });
}

gm_status gm_run(const char* bundle_path, const char* config_path,
                 const char* out_dir, int intent, int threads) {
  return guarded([&] {
    require(bundle_path && out_dir, "gm_run: null argument");
    const auto bundle = load_bundle(bundle_path);
    std::optional<PipelineConfig> override_cfg;
    if (config_path) override_cfg = load_config(config_path);
    const auto scene =
        load_scene(bundle, override_cfg ? &*override_cfg : nullptr);
    RunOptions opts;
    if (intent >= 0) opts.intent = intent;
    if (threads > 0) opts.threads = threads;
    run_pipeline(scene, out_dir, opts);
  });
}

gm_status gm_eval(const char* logs_dir, const char* maps_dir,
                  const char* config_path, char** report_json) {
  return guarded([&] {
    require(logs_dir && maps_dir && report_json, "gm_eval: null argument");
    PipelineConfig cfg;
    std::string config_dir = ".";
    if (config_path) {
      cfg = load_config(config_path);
      const auto parent = std::filesystem::path(config_path).parent_path();
      if (!parent.empty()) config_dir = parent.string();
    }
    const auto report = evaluate_directory(logs_dir, maps_dir, cfg, config_dir);
    *report_json = dup_string(report_to_json(report));
  });
}

gm_status gm_derive_pose(const char* map_path, const char* chain_path,
                         const char* mesh_path, const char* config_path,
                         char** pose_json) {
  return guarded([&] {
    require(map_path && chain_path && pose_json,
            "gm_derive_pose: null argument");
    const auto map = refine::load_contact_map(map_path);
    const auto chain = hand::load_chain(chain_path);
    PipelineConfig cfg;
    if (config_path) cfg = load_config(config_path);
    std::optional<geom::MeshQuery> object;
    if (mesh_path) object.emplace(geom::load_obj(mesh_path));
    const auto h0 = hand::default_initial_pose(
        chain, map, object ? &*object : nullptr, cfg.initial_pose);
    hand::PartitionOptions popts;
    popts.thumb_side = cfg.thumb_side;
    popts.wrist_rotation = hand::rotation_exp(h0.wrist_rot);
    const auto assignment = hand::partition_regions(map, chain, popts);
    const auto ik = hand::solve_ik(chain, h0, assignment, cfg.ik);
    hand::PseudoPose pose;
    pose.intent_id = map.intent_id;
    pose.configuration = ik.configuration;
    pose.objective_trace = ik.objective_trace;
    *pose_json = dup_string(hand::pose_to_json(pose));
  });
}

}  // extern "C"
