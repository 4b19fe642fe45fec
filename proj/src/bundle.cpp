#include "graspmap/bundle.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "graspmap/error.hpp"
#include "graspmap/image_io.hpp"

namespace graspmap {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io, "cannot open: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::io, "cannot write: " + path);
  out << text;
  if (!out) fail(ErrorCode::io, "write failed: " + path);
}

}  // namespace

std::string camera_to_json(const geom::CameraView& view) {
  json j;
  j["view_id"] = view.view_id;
  j["width"] = view.intrinsics.width;
  j["height"] = view.intrinsics.height;
  j["fx"] = view.intrinsics.fx;
  j["fy"] = view.intrinsics.fy;
  j["cx"] = view.intrinsics.cx;
  j["cy"] = view.intrinsics.cy;
  json rot = json::array();
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) rot.push_back(view.pose.rotation(r, c));
  j["rotation"] = rot;
  j["translation"] = {view.pose.translation.x(), view.pose.translation.y(),
                      view.pose.translation.z()};
  return j.dump(2) + "\n";
}

geom::CameraView camera_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::parse, std::string("camera: ") + e.what());
  }
  for (const char* key : {"view_id", "width", "height", "fx", "fy", "cx", "cy",
                          "rotation", "translation"})
    if (!j.contains(key))
      fail(ErrorCode::parse, std::string("camera: missing '") + key + "'");

  geom::CameraView view;
  view.view_id = j["view_id"].get<int>();
  view.intrinsics.width = j["width"].get<int>();
  view.intrinsics.height = j["height"].get<int>();
  view.intrinsics.fx = j["fx"].get<double>();
  view.intrinsics.fy = j["fy"].get<double>();
  view.intrinsics.cx = j["cx"].get<double>();
  view.intrinsics.cy = j["cy"].get<double>();
  const auto& rot = j["rotation"];
  if (!rot.is_array() || rot.size() != 9)
    fail(ErrorCode::parse, "camera: rotation must be a 9-array (row-major)");
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c)
      view.pose.rotation(r, c) = rot[static_cast<size_t>(3 * r + c)].get<double>();
  const auto& t = j["translation"];
  if (!t.is_array() || t.size() != 3)
    fail(ErrorCode::parse, "camera: translation must be a 3-array");
  for (int i = 0; i < 3; ++i) view.pose.translation[i] = t[i].get<double>();
  view.intrinsics.validate();
  view.pose.validate();
  return view;
}

geom::CameraView load_camera(const std::string& path) {
  try {
    return camera_from_json(slurp(path));
  } catch (const Error& e) {
    fail(e.code(), path + ": " + e.what());
  }
}

void save_camera(const geom::CameraView& view, const std::string& path) {
  spit(path, camera_to_json(view));
}

std::string mask_filename(int view_id, int intent_id) {
  return "mask_" + std::to_string(view_id) + "_" + std::to_string(intent_id) +
         ".pgm";
}

std::string SceneBundle::resolve(const std::string& rel) const {
  if (rel.empty()) return rel;
  fs::path p(rel);
  if (p.is_absolute()) return rel;
  return (fs::path(dir) / p).string();
}

SceneBundle load_bundle(const std::string& manifest_path) {
  json j;
  try {
    j = json::parse(slurp(manifest_path));
  } catch (const json::parse_error& e) {
    fail(ErrorCode::parse, manifest_path + ": " + e.what());
  }
  if (!j.is_object()) fail(ErrorCode::parse, manifest_path + ": not an object");
  for (const auto& item : j.items()) {
    const std::string& key = item.key();
    if (key != "object_id" && key != "mesh" && key != "views" &&
        key != "proposals" && key != "config")
      fail(ErrorCode::parse, manifest_path + ": unknown key '" + key + "'");
  }
  for (const char* key : {"mesh", "views", "proposals"})
    if (!j.contains(key))
      fail(ErrorCode::parse,
           manifest_path + ": missing '" + std::string(key) + "'");

  SceneBundle b;
  b.dir = fs::path(manifest_path).parent_path().string();
  if (b.dir.empty()) b.dir = ".";
  if (j.contains("object_id")) b.object_id = j["object_id"].get<std::string>();
  b.mesh = j["mesh"].get<std::string>();
  b.proposals = j["proposals"].get<std::string>();
  if (j.contains("config")) b.config = j["config"].get<std::string>();
  if (!j["views"].is_array() || j["views"].empty())
    fail(ErrorCode::parse, manifest_path + ": 'views' must be a non-empty array");
  for (const auto& v : j["views"]) {
    for (const char* key : {"view_id", "camera", "depth"})
      if (!v.contains(key))
        fail(ErrorCode::parse,
             manifest_path + ": view entry missing '" + std::string(key) + "'");
    BundleViewEntry entry;
    entry.view_id = v["view_id"].get<int>();
    entry.camera = v["camera"].get<std::string>();
    entry.depth = v["depth"].get<std::string>();
    b.views.push_back(std::move(entry));
  }
  return b;
}

void save_bundle(const SceneBundle& bundle, const std::string& manifest_path) {
  json j;
  j["object_id"] = bundle.object_id;
  j["mesh"] = bundle.mesh;
  json views = json::array();
  for (const auto& v : bundle.views)
    views.push_back(json{{"view_id", v.view_id},
                         {"camera", v.camera},
                         {"depth", v.depth}});
  j["views"] = views;
  j["proposals"] = bundle.proposals;
  if (!bundle.config.empty()) j["config"] = bundle.config;
  spit(manifest_path, j.dump(2) + "\n");
}

int ValidationReport::errors() const {
  int n = 0;
  for (const auto& f : findings) n += f.error ? 1 : 0;
  return n;
}

int ValidationReport::warnings() const {
  return static_cast<int>(findings.size()) - errors();
}

std::string ValidationReport::to_json() const {
  json j;
  j["ok"] = ok();
  j["errors"] = errors();
  j["warnings"] = warnings();
  json items = json::array();
  for (const auto& f : findings)
    items.push_back(json{{"level", f.error ? "error" : "warning"},
                         {"message", f.message}});
  j["findings"] = items;
  return j.dump(2) + "\n";
}

ValidationReport validate_bundle(const SceneBundle& bundle) {
  ValidationReport report;
  auto error = [&](const std::string& msg) {
    report.findings.push_back({true, msg});
  };
  auto warn = [&](const std::string& msg) {
    report.findings.push_back({false, msg});
  };
  auto exists = [&](const std::string& rel, const char* what) {
    if (rel.empty()) {
      error(std::string(what) + ": empty path");
      return false;
    }
    if (!fs::exists(bundle.resolve(rel))) {
      error(std::string(what) + " not found: " + rel);
      return false;
    }
    return true;
  };

  // Mesh
  if (exists(bundle.mesh, "mesh")) {
    try {
      const auto mesh = geom::load_obj(bundle.resolve(bundle.mesh));
      if (!mesh.watertight)
        error("mesh is not watertight: " + bundle.mesh);
    } catch (const Error& e) {
      error("mesh unreadable: " + std::string(e.what()));
    }
  }

  // Views: cameras and depths
  std::vector<int> ids;
  struct ViewDims {
    int view_id, width, height;
  };
  std::vector<ViewDims> dims;
  for (const auto& entry : bundle.views) {
    if (std::find(ids.begin(), ids.end(), entry.view_id) != ids.end())
      error("duplicate view_id " + std::to_string(entry.view_id));
    ids.push_back(entry.view_id);

    geom::CameraView cam;
    bool cam_ok = false;
    if (exists(entry.camera, "camera")) {
      try {
        cam = load_camera(bundle.resolve(entry.camera));
        cam_ok = true;
        if (cam.view_id != entry.view_id)
          error("camera " + entry.camera + " carries view_id " +
                std::to_string(cam.view_id) + ", manifest says " +
                std::to_string(entry.view_id));
      } catch (const Error& e) {
        error("camera unreadable: " + std::string(e.what()));
      }
    }
    if (exists(entry.depth, "depth")) {
      try {
        const auto depth = geom::read_pfm(bundle.resolve(entry.depth));
        if (cam_ok && (depth.width != cam.intrinsics.width ||
                       depth.height != cam.intrinsics.height))
          error("depth " + entry.depth + " is " + std::to_string(depth.width) +
                "x" + std::to_string(depth.height) + ", camera says " +
                std::to_string(cam.intrinsics.width) + "x" +
                std::to_string(cam.intrinsics.height));
        else
          dims.push_back({entry.view_id, depth.width, depth.height});
      } catch (const Error& e) {
        error("depth unreadable: " + std::string(e.what()));
      }
    }
  }

  // Proposals and masks
  if (exists(bundle.proposals, "proposals")) {
    try {
      const auto intents =
          ingest::load_proposals_file(bundle.resolve(bundle.proposals));
      if (intents.size() < 2 || intents.size() > 4)
        warn("bundle declares " + std::to_string(intents.size()) +
             " intents; typical scenes carry 2-4");
      for (const auto& intent : intents) {
        for (const auto& vp : intent.views) {
          if (std::find(ids.begin(), ids.end(), vp.view_id) == ids.end()) {
            error("intent " + std::to_string(intent.intent_id) +
                  " references unknown view " + std::to_string(vp.view_id));
            continue;
          }
          const std::string mask_rel =
              mask_filename(vp.view_id, intent.intent_id);
          if (!exists(mask_rel, "mask")) continue;
          try {
            const auto mask = geom::read_pgm(bundle.resolve(mask_rel));
            for (const auto& d : dims)
              if (d.view_id == vp.view_id &&
                  (mask.width != d.width || mask.height != d.height))
                error("mask " + mask_rel + " is " + std::to_string(mask.width) +
                      "x" + std::to_string(mask.height) + ", depth is " +
                      std::to_string(d.width) + "x" + std::to_string(d.height));
          } catch (const Error& e) {
            error("mask unreadable: " + std::string(e.what()));
          }
        }
      }
    } catch (const Error& e) {
      error("proposals unreadable: " + std::string(e.what()));
    }
  }

  // Config and chain
  if (!bundle.config.empty() && exists(bundle.config, "config")) {
    try {
      const auto cfg = load_config(bundle.resolve(bundle.config));
      if (!fs::exists(bundle.resolve(cfg.chain_path)))
        error("chain document not found: " + cfg.chain_path);
    } catch (const Error& e) {
      error("config invalid: " + std::string(e.what()));
    }
  }

  return report;
}

int LoadedScene::view_index(int view_id) const {
  for (size_t i = 0; i < views.size(); ++i)
    if (views[i].view_id == view_id) return static_cast<int>(i);
  return -1;
}

LoadedScene load_scene(const SceneBundle& bundle,
                       const PipelineConfig* override_config) {
  LoadedScene scene;
  scene.dir = bundle.dir;
  scene.object_id = bundle.object_id;

  scene.mesh = geom::load_obj(bundle.resolve(bundle.mesh));
  if (!scene.mesh.watertight)
    fail(ErrorCode::topology, "mesh is not watertight: " + bundle.mesh);

  for (const auto& entry : bundle.views) {
    auto view = load_camera(bundle.resolve(entry.camera));
    if (view.view_id != entry.view_id)
      fail(ErrorCode::validation,
           "camera " + entry.camera + " carries view_id " +
               std::to_string(view.view_id) + ", manifest says " +
               std::to_string(entry.view_id));
    view.depth = geom::read_pfm(bundle.resolve(entry.depth));
    if (view.depth.width != view.intrinsics.width ||
        view.depth.height != view.intrinsics.height)
      fail(ErrorCode::shape_mismatch,
           "depth " + entry.depth + " does not match camera " + entry.camera);
    scene.views.push_back(std::move(view));
  }
  std::sort(scene.views.begin(), scene.views.end(),
            [](const geom::CameraView& a, const geom::CameraView& b) {
              return a.view_id < b.view_id;
            });
  for (size_t i = 1; i < scene.views.size(); ++i)
    if (scene.views[i].view_id == scene.views[i - 1].view_id)
      fail(ErrorCode::validation,
           "duplicate view_id " + std::to_string(scene.views[i].view_id));

  scene.intents = ingest::load_proposals_file(bundle.resolve(bundle.proposals));

  scene.masks.resize(scene.intents.size());
  for (size_t i = 0; i < scene.intents.size(); ++i) {
    scene.masks[i].resize(scene.views.size());
    for (const auto& vp : scene.intents[i].views) {
      const int v = scene.view_index(vp.view_id);
      if (v < 0)
        fail(ErrorCode::validation,
             "intent " + std::to_string(scene.intents[i].intent_id) +
                 " references unknown view " + std::to_string(vp.view_id));
      const std::string rel =
          mask_filename(vp.view_id, scene.intents[i].intent_id);
      auto mask = geom::read_pgm(bundle.resolve(rel));
      const auto& depth = scene.views[static_cast<size_t>(v)].depth;
      if (mask.width != depth.width || mask.height != depth.height)
        fail(ErrorCode::shape_mismatch, "mask " + rel + " does not match depth");
      scene.masks[i][static_cast<size_t>(v)] = std::move(mask);
    }
  }

  if (override_config)
    scene.config = *override_config;
  else if (!bundle.config.empty())
    scene.config = load_config(bundle.resolve(bundle.config));
  scene.config.validate();

  scene.chain = hand::load_chain(bundle.resolve(scene.config.chain_path));
  return scene;
}

}  // namespace graspmap
