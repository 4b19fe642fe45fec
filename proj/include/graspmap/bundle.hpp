#pragma once

#include <optional>
#include <string>
#include <vector>

#include "graspmap/camera.hpp"
#include "graspmap/chain.hpp"
#include "graspmap/config.hpp"
#include "graspmap/ingest.hpp"
#include "graspmap/mesh.hpp"

namespace graspmap {

// Camera document: {"view_id", "width", "height", "fx", "fy", "cx", "cy",
// "rotation": [9, row-major, world-to-camera], "translation": [3]}.
// The depth map travels separately; the returned view has an empty one.
std::string camera_to_json(const geom::CameraView& view);
geom::CameraView camera_from_json(const std::string& text);
geom::CameraView load_camera(const std::string& path);
void save_camera(const geom::CameraView& view, const std::string& path);

// Bundle-relative name of the mask for one (view, intent) pair.
std::string mask_filename(int view_id, int intent_id);

struct BundleViewEntry {
  int view_id = 0;
  std::string camera;  // paths relative to the bundle directory
  std::string depth;
};

// Parsed manifest; file contents are loaded lazily by validate/load_scene.
struct SceneBundle {
  std::string dir;
  std::string object_id;
  std::string mesh;
  std::vector<BundleViewEntry> views;
  std::string proposals;
  std::string config;  // empty when the bundle ships no config

  std::string resolve(const std::string& rel) const;
};

SceneBundle load_bundle(const std::string& manifest_path);
void save_bundle(const SceneBundle& bundle, const std::string& manifest_path);

struct Finding {
  bool error = true;  // false = warning
  std::string message;
};

struct ValidationReport {
  std::vector<Finding> findings;

  int errors() const;
  int warnings() const;
  bool ok() const { return errors() == 0; }
  std::string to_json() const;
};

// Checks existence and mutual consistency of everything the manifest names.
// Collects findings instead of throwing.
ValidationReport validate_bundle(const SceneBundle& bundle);

// Everything in memory, ready to run.  Throws on the first defect.
struct LoadedScene {
  std::string dir;
  std::string object_id;
  geom::TriangleMesh mesh;
  std::vector<geom::CameraView> views;  // ascending view_id, depth attached
  std::vector<ingest::IntentProposal> intents;
  // masks[intent][view index]: filtered against nothing yet; nullopt where the
  // intent has no usable proposal for that view.
  std::vector<std::vector<std::optional<geom::MaskImage>>> masks;
  PipelineConfig config;
  hand::KinematicChain chain;

  int view_index(int view_id) const;  // -1 when absent
};

LoadedScene load_scene(const SceneBundle& bundle,
                       const PipelineConfig* override_config = nullptr);

}  // namespace graspmap
