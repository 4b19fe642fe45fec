#include "graspmap/synth.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "json.hpp"

#include "graspmap/bundle.hpp"
#include "graspmap/chain.hpp"
#include "graspmap/config.hpp"
#include "graspmap/error.hpp"
#include "graspmap/image_io.hpp"
#include "graspmap/mesh.hpp"
#include "graspmap/primitives.hpp"
#include "graspmap/render.hpp"

namespace graspmap {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double uniform01(std::uint64_t x) {
  return static_cast<double>(splitmix64(x) >> 11) * 0x1.0p-53;
}

struct Box {
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;  // half-open
  bool empty() const { return x1 <= x0 || y1 <= y0; }
};

Box silhouette_box(const geom::DepthMap& depth) {
  Box b{depth.width, depth.height, 0, 0};
  for (int y = 0; y < depth.height; ++y)
    for (int x = 0; x < depth.width; ++x)
      if (depth.has(x, y)) {
        b.x0 = std::min(b.x0, x);
        b.y0 = std::min(b.y0, y);
        b.x1 = std::max(b.x1, x + 1);
        b.y1 = std::max(b.y1, y + 1);
      }
  if (b.x1 <= b.x0) return Box{};
  return b;
}

geom::MaskImage silhouette_mask(const geom::DepthMap& depth) {
  geom::MaskImage mask(depth.width, depth.height);
  for (int y = 0; y < depth.height; ++y)
    for (int x = 0; x < depth.width; ++x)
      if (depth.has(x, y)) mask.at(x, y) = 1;
  return mask;
}

// Silhouette restricted to the top and bottom quarter bands of its own bbox.
geom::MaskImage ends_mask(const geom::DepthMap& depth, const Box& box) {
  geom::MaskImage mask(depth.width, depth.height);
  if (box.empty()) return mask;
  const int quarter = std::max(1, (box.y1 - box.y0) / 4);
  for (int y = box.y0; y < box.y1; ++y) {
    const bool in_band = y < box.y0 + quarter || y >= box.y1 - quarter;
    if (!in_band) continue;
    for (int x = box.x0; x < box.x1; ++x)
      if (depth.has(x, y)) mask.at(x, y) = 1;
  }
  return mask;
}

json view_proposal(int view_id, const Box& box, double confidence) {
  json v;
  v["view_id"] = view_id;
  v["visible"] = !box.empty();
  v["bbox"] = {box.x0, box.y0, box.x1, box.y1};
  v["confidence"] = confidence;
  return v;
}

}  // namespace

std::string synth_bundle(const SynthOptions& opts, const std::string& out_dir) {
  if (opts.resolution < 16)
    fail(ErrorCode::invalid_argument, "synth: resolution must be >= 16");
  if (opts.view_count < 2)
    fail(ErrorCode::invalid_argument, "synth: need at least 2 views");
  if (opts.distance <= 0)
    fail(ErrorCode::invalid_argument, "synth: distance must be > 0");

  const auto mesh = geom::make_shape(opts.shape);  // rejects unknown names
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);

  geom::save_obj(mesh, (dir / "mesh.obj").string());
  hand::save_chain(hand::make_five_finger_hand(), (dir / "hand.json").string());

  PipelineConfig cfg;
  cfg.chain_path = "hand.json";
  cfg.object_mesh = "mesh.obj";
  save_config(cfg, (dir / "config.json").string());

  const geom::MeshQuery query(mesh);
  const int res = opts.resolution;
  const double focal = 1.4 * res;

  SceneBundle bundle;
  bundle.dir = out_dir;
  bundle.object_id = opts.shape;
  bundle.mesh = "mesh.obj";
  bundle.proposals = "proposals.json";
  bundle.config = "config.json";

  std::vector<geom::DepthMap> depths;
  std::vector<Box> boxes;
  for (int i = 0; i < opts.view_count; ++i) {
    const double azimuth = 2.0 * M_PI * i / opts.view_count;
    const Eigen::Vector3d eye(
        opts.distance * std::cos(azimuth) * std::cos(opts.elevation),
        opts.distance * std::sin(azimuth) * std::cos(opts.elevation),
        opts.distance * std::sin(opts.elevation));

    geom::CameraView view;
    view.view_id = i;
    view.intrinsics = {focal, focal, res / 2.0, res / 2.0, res, res};
    view.pose = geom::look_at(eye, Eigen::Vector3d::Zero());
    view.depth = geom::render_depth(query, view);

    const std::string cam_name = "camera_" + std::to_string(i) + ".json";
    const std::string depth_name = "depth_" + std::to_string(i) + ".pfm";
    save_camera(view, (dir / cam_name).string());
    geom::write_pfm(view.depth, (dir / depth_name).string());
    bundle.views.push_back({i, cam_name, depth_name});

    boxes.push_back(silhouette_box(view.depth));
    depths.push_back(std::move(view.depth));
  }

  // Intent 1: the whole visible surface.  Intent 2: the outer quarter bands,
  // standing in for an "ends" part proposal.
  json intents = json::array();
  json body, ends;
  body["intent_id"] = 1;
  body["part_name"] = "body";
  body["description"] = "whole visible surface";
  ends["intent_id"] = 2;
  ends["part_name"] = "ends";
  ends["description"] = "outer quarter bands of the silhouette";
  json body_views = json::array();
  json ends_views = json::array();

  for (int i = 0; i < opts.view_count; ++i) {
    const std::uint64_t key =
        splitmix64(opts.seed ^ (0x517cc1b727220a95ULL * (i + 1)));
    const double jitter_body = (uniform01(key) - 0.5) * 0.1;
    const double jitter_ends = (uniform01(key + 1) - 0.5) * 0.1;
    const double conf_body = std::clamp(0.9 + jitter_body, 0.0, 1.0);
    const double conf_ends = std::clamp(0.7 + jitter_ends, 0.0, 1.0);

    body_views.push_back(view_proposal(i, boxes[i], conf_body));
    ends_views.push_back(view_proposal(i, boxes[i], conf_ends));

    geom::write_pgm(silhouette_mask(depths[i]),
                    (dir / mask_filename(i, 1)).string());
    geom::write_pgm(ends_mask(depths[i], boxes[i]),
                    (dir / mask_filename(i, 2)).string());
  }
  body["views"] = body_views;
  ends["views"] = ends_views;
  intents.push_back(body);
  intents.push_back(ends);

  json proposals;
  proposals["object_id"] = opts.shape;
  proposals["intents"] = intents;
  {
    std::ofstream out(dir / "proposals.json", std::ios::binary);
    if (!out) fail(ErrorCode::io, "cannot write proposals.json");
    out << proposals.dump(2) << "\n";
  }

  const std::string manifest = (dir / "bundle.json").string();
  save_bundle(bundle, manifest);
  return manifest;
}

}  // namespace graspmap
