#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "graspmap/camera.hpp"
#include "graspmap/ingest.hpp"
#include "graspmap/mesh_query.hpp"

namespace graspmap::refine {

struct RefineConfig {
  double alpha = 0.5;          // neighbor support weight
  double tau = 0.01;           // depth agreement threshold, meters
  double seed_fraction = 0.10;
  enum class NeighborPolicy { all_views, ring_adjacent };
  NeighborPolicy neighbors = NeighborPolicy::all_views;
  int convexity_samples = 16;
  double surface_tol = 1e-3;   // meters
  bool seed_component = true;  // keep only the largest connected seed cluster
  double seed_component_radius = 0.0;  // 0 = 2x median nearest-neighbor spacing
  double pair_distance_cutoff = 0.0;   // 0 = no pruning
  int threads = 1;
};

// Where a lifted point came from; also the deterministic tie-break order.
struct PointProvenance {
  int view_id = 0;
  int px = 0, py = 0;
};

struct ScoredCloud {
  std::vector<Eigen::Vector3d> points;
  std::vector<double> scores;
  std::vector<PointProvenance> provenance;

  size_t size() const { return points.size(); }
};

struct ContactMap {
  int intent_id = 0;
  std::vector<Eigen::Vector3d> points;
  std::vector<double> scores;
  std::vector<int> seed_indices;  // into points
};

struct Diagnostics {
  long mask_pixels = 0;
  long supported_pixels = 0;   // pixels that gained at least one neighbor vote
  double max_support = 0;      // largest total support added to one pixel
  long lifted_points = 0;
  long skipped_no_depth = 0;
  long seeds_selected = 0;
  long seeds_after_component = 0;
  long candidates = 0;
  long accepted = 0;
  long rejected = 0;
  long off_surface = 0;  // lifted points farther than surface_tol from the mesh
};

// One intent's per-view inputs. Masks are already depth-filtered; maps are
// the initial per-pixel scores on the same grids.
struct IntentViews {
  std::vector<const geom::CameraView*> views;
  std::vector<const geom::MaskImage*> masks;
  std::vector<double> calibrated_confidence;  // one per view
  std::vector<ingest::ConfidenceMap> initial_maps;
};

// Adds alpha * c_j to a pixel's score for every neighbor view j that sees the
// same surface point (depth agreement within tau) inside its own mask.
std::vector<ingest::ConfidenceMap> cross_view_refine(const IntentViews& input,
                                                     const RefineConfig& cfg);

// Divides every view's scores by the single maximum across all views.
// All-zero input is a degenerate_geometry error.
std::vector<ingest::ConfidenceMap> normalize_global(
    const std::vector<ingest::ConfidenceMap>& maps);

// One scored 3D point per positive-score pixel with valid depth, views in
// ascending id order, pixels row-major. Pixels lacking depth are counted in
// the diagnostics instead of lifted.
ScoredCloud lift_to_3d(const std::vector<ingest::ConfidenceMap>& maps,
                       const std::vector<const geom::CameraView*>& views,
                       Diagnostics* diag = nullptr);

// Top ceil(seed_fraction * n) points by (score desc, provenance asc); when
// cfg.seed_component is set, restricted to the largest connected component
// of the seed radius graph afterwards.
std::vector<int> select_seeds(const ScoredCloud& cloud, const RefineConfig& cfg,
                              Diagnostics* diag = nullptr);

// Keeps seeds plus every point whose segment to at least one seed stays
// inside the volume (or within surface_tol of it). Acceptance is strictly
// point-to-seed; accepted non-seeds never accept further points.
ContactMap convexity_expand(const ScoredCloud& cloud,
                            const std::vector<int>& seeds,
                            const geom::MeshQuery& object,
                            const RefineConfig& cfg,
                            Diagnostics* diag = nullptr);

// Full per-intent pipeline: refine -> normalize -> lift -> seeds -> expand.
ContactMap build_contact_map(int intent_id, const IntentViews& input,
                             const geom::MeshQuery& object,
                             const RefineConfig& cfg,
                             Diagnostics* diag = nullptr);

// {"intent_id", "points", "scores", "seed_indices"}
std::string contact_map_to_json(const ContactMap& map);
ContactMap contact_map_from_json(const std::string& text);
ContactMap load_contact_map(const std::string& path);
void save_contact_map(const ContactMap& map, const std::string& path);

// ASCII PLY with x, y, z and a confidence property, for inspection.
void save_contact_map_ply(const ContactMap& map, const std::string& path);

}  // namespace graspmap::refine
