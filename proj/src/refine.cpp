#include "graspmap/refine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "parallel_for.hpp"

namespace graspmap::refine {

using nlohmann::json;

namespace {

void check_intent_views(const IntentViews& input) {
  const size_t n = input.views.size();
  if (n == 0)
    fail(ErrorCode::empty_input, "refine: intent has no views");
  if (input.masks.size() != n || input.calibrated_confidence.size() != n ||
      input.initial_maps.size() != n)
    fail(ErrorCode::shape_mismatch, "refine: per-view arrays differ in length");
  for (size_t i = 0; i < n; ++i) {
    const auto& v = *input.views[i];
    const auto& m = *input.masks[i];
    if (m.width != v.intrinsics.width || m.height != v.intrinsics.height)
      fail(ErrorCode::shape_mismatch, "refine: mask does not match view size");
    if (input.initial_maps[i].width != m.width ||
        input.initial_maps[i].height != m.height)
      fail(ErrorCode::shape_mismatch, "refine: map does not match view size");
  }
}

std::vector<int> neighbor_ids(size_t i, size_t n,
                              RefineConfig::NeighborPolicy policy) {
  std::vector<int> out;
  if (n <= 1) return out;
  if (policy == RefineConfig::NeighborPolicy::ring_adjacent) {
    out.push_back(static_cast<int>((i + 1) % n));
    if (n > 2) out.push_back(static_cast<int>((i + n - 1) % n));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
  } else {
    for (size_t j = 0; j < n; ++j)
      if (j != i) out.push_back(static_cast<int>(j));
  }
  return out;
}

}  // namespace

std::vector<ingest::ConfidenceMap> cross_view_refine(const IntentViews& input,
                                                     const RefineConfig& cfg) {
  check_intent_views(input);
  const size_t n = input.views.size();
  std::vector<ingest::ConfidenceMap> refined = input.initial_maps;
  for (auto& m : refined) m.stage = ingest::MapStage::refined;

  for (size_t i = 0; i < n; ++i) {
    const geom::CameraView& src = *input.views[i];
    const geom::MaskImage& mask = *input.masks[i];
    const auto nbrs = neighbor_ids(i, n, cfg.neighbors);
    if (nbrs.empty()) continue;
    for (int y = 0; y < mask.height; ++y) {
      for (int x = 0; x < mask.width; ++x) {
        if (!mask.at(x, y) || !src.depth.has(x, y)) continue;
        const double d = src.depth.at(x, y);
        const Eigen::Vector3d p =
            geom::back_project(src, geom::pixel_center(x, y), d);
        double support = 0;
        for (int j : nbrs) {
          const geom::CameraView& dst = *input.views[j];
          geom::Reprojection r;
          try {
            r = geom::reproject(p, dst);
          } catch (const Error&) {
            continue;  // behind the neighbor camera
          }
          const int ix = static_cast<int>(std::floor(r.pixel.x()));
          const int iy = static_cast<int>(std::floor(r.pixel.y()));
          if (!dst.depth.has(ix, iy)) continue;
          const double delta =
              std::abs(static_cast<double>(dst.depth.at(ix, iy)) - r.z);
          if (delta < cfg.tau && input.masks[j]->member(ix, iy))
            support += cfg.alpha * input.calibrated_confidence[j];
        }
        refined[i].at(x, y) += support;
      }
    }
  }
  return refined;
}

std::vector<ingest::ConfidenceMap> normalize_global(
    const std::vector<ingest::ConfidenceMap>& maps) {
  if (maps.empty()) fail(ErrorCode::empty_input, "normalize_global: no maps");
  double global_max = 0;
  for (const auto& m : maps) global_max = std::max(global_max, m.max_score());
  if (global_max <= 0)
    fail(ErrorCode::degenerate_geometry,
         "normalize_global: all scores are zero");
  std::vector<ingest::ConfidenceMap> out = maps;
  for (auto& m : out) {
    for (double& s : m.scores) s /= global_max;
    m.stage = ingest::MapStage::normalized;
  }
  return out;
}

ScoredCloud lift_to_3d(const std::vector<ingest::ConfidenceMap>& maps,
                       const std::vector<const geom::CameraView*>& views,
                       Diagnostics* diag) {
  if (maps.size() != views.size())
    fail(ErrorCode::shape_mismatch, "lift_to_3d: maps/views length mismatch");
  std::vector<size_t> order(views.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return views[a]->view_id < views[b]->view_id;
  });

  ScoredCloud cloud;
  for (size_t k : order) {
    const geom::CameraView& view = *views[k];
    const ingest::ConfidenceMap& map = maps[k];
    if (map.width != view.intrinsics.width ||
        map.height != view.intrinsics.height)
      fail(ErrorCode::shape_mismatch, "lift_to_3d: map does not match view");
    for (int y = 0; y < map.height; ++y) {
      for (int x = 0; x < map.width; ++x) {
        const double s = map.at(x, y);
        if (s <= 0) continue;
        if (!view.depth.has(x, y)) {
          if (diag) ++diag->skipped_no_depth;
          continue;
        }
        cloud.points.push_back(geom::back_project(
            view, geom::pixel_center(x, y), view.depth.at(x, y)));
        cloud.scores.push_back(s);
        cloud.provenance.push_back({view.view_id, x, y});
      }
    }
  }
  if (diag) diag->lifted_points = static_cast<long>(cloud.size());
  return cloud;
}

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

// Median distance from each seed to its nearest other seed. O(k^2): seed sets
// stay small relative to the cloud.
double median_nn_spacing(const ScoredCloud& cloud,
                         const std::vector<int>& seeds) {
  std::vector<double> nn(seeds.size(),
                         std::numeric_limits<double>::infinity());
  for (size_t a = 0; a < seeds.size(); ++a) {
    for (size_t b = a + 1; b < seeds.size(); ++b) {
      const double d =
          (cloud.points[seeds[a]] - cloud.points[seeds[b]]).norm();
      nn[a] = std::min(nn[a], d);
      nn[b] = std::min(nn[b], d);
    }
  }
  std::sort(nn.begin(), nn.end());
  return nn[nn.size() / 2];
}

}  // namespace

std::vector<int> select_seeds(const ScoredCloud& cloud, const RefineConfig& cfg,
                              Diagnostics* diag) {
  if (cloud.size() == 0)
    fail(ErrorCode::empty_input, "select_seeds: empty cloud");
  if (!(cfg.seed_fraction > 0 && cfg.seed_fraction <= 1))
    fail(ErrorCode::invalid_argument,
         "select_seeds: seed_fraction outside (0, 1]");
  const int n = static_cast<int>(cloud.size());
  const int k = static_cast<int>(std::ceil(cfg.seed_fraction * n));

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  // Score descending; ties resolved by lift order, which is the provenance
  // order, so pixel index doubles as the tie-break.
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return cloud.scores[a] > cloud.scores[b];
  });
  std::vector<int> seeds(order.begin(), order.begin() + k);
  std::sort(seeds.begin(), seeds.end());
  if (diag) diag->seeds_selected = k;

  if (cfg.seed_component && seeds.size() > 1) {
    double radius = cfg.seed_component_radius;
    if (radius <= 0) radius = 2.0 * median_nn_spacing(cloud, seeds);
    if (std::isfinite(radius) && radius > 0) {
      UnionFind uf(static_cast<int>(seeds.size()));
      for (size_t a = 0; a < seeds.size(); ++a)
        for (size_t b = a + 1; b < seeds.size(); ++b)
          if ((cloud.points[seeds[a]] - cloud.points[seeds[b]]).norm() <=
              radius)
            uf.unite(static_cast<int>(a), static_cast<int>(b));
      std::vector<int> comp_size(seeds.size(), 0);
      for (size_t a = 0; a < seeds.size(); ++a) ++comp_size[uf.find(static_cast<int>(a))];
      // Largest component; ties go to the one containing the lowest index.
      int best_root = -1;
      for (size_t a = 0; a < seeds.size(); ++a) {
        const int root = uf.find(static_cast<int>(a));
        if (best_root < 0 || comp_size[root] > comp_size[best_root])
          best_root = root;
      }
      std::vector<int> kept;
      for (size_t a = 0; a < seeds.size(); ++a)
        if (uf.find(static_cast<int>(a)) == best_root)
          kept.push_back(seeds[a]);
      seeds = std::move(kept);
    }
  }
  if (diag) diag->seeds_after_component = static_cast<long>(seeds.size());
  return seeds;
}

ContactMap convexity_expand(const ScoredCloud& cloud,
                            const std::vector<int>& seeds,
                            const geom::MeshQuery& object,
                            const RefineConfig& cfg, Diagnostics* diag) {
  if (seeds.empty())
    fail(ErrorCode::empty_input, "convexity_expand: no seeds");
  const int n = static_cast<int>(cloud.size());
  for (int s : seeds)
    if (s < 0 || s >= n)
      fail(ErrorCode::out_of_bounds, "convexity_expand: seed index out of range");
  if (!object.mesh().watertight)
    fail(ErrorCode::topology, "convexity_expand: mesh is not watertight");

  std::vector<uint8_t> is_seed(n, 0);
  for (int s : seeds) is_seed[s] = 1;

  const double cutoff = cfg.pair_distance_cutoff;
  std::vector<uint8_t> keep(n, 0);
  parallel_for(n, cfg.threads, [&](long lo, long hi) {
    for (long q = lo; q < hi; ++q) {
      if (is_seed[q]) {
        keep[q] = 1;
        continue;
      }
      // Try nearby seeds first; a convex neighborhood accepts immediately.
      int best_seed = -1;
      double best_d = std::numeric_limits<double>::infinity();
      for (int s : seeds) {
        const double d = (cloud.points[q] - cloud.points[s]).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best_seed = s;
        }
      }
      auto pair_ok = [&](int s) {
        if (cutoff > 0 &&
            (cloud.points[q] - cloud.points[s]).norm() > cutoff)
          return false;
        return object.segment_inside(cloud.points[q], cloud.points[s],
                                     cfg.convexity_samples, cfg.surface_tol);
      };
      if (pair_ok(best_seed)) {
        keep[q] = 1;
        continue;
      }
      for (int s : seeds) {
        if (s == best_seed) continue;
        if (pair_ok(s)) {
          keep[q] = 1;
          break;
        }
      }
    }
  });

  ContactMap map;
  std::vector<int> new_index(n, -1);
  for (int q = 0; q < n; ++q) {
    if (!keep[q]) continue;
    new_index[q] = static_cast<int>(map.points.size());
    map.points.push_back(cloud.points[q]);
    map.scores.push_back(cloud.scores[q]);
  }
  for (int s : seeds) map.seed_indices.push_back(new_index[s]);
  std::sort(map.seed_indices.begin(), map.seed_indices.end());

  if (diag) {
    diag->candidates = n - static_cast<long>(seeds.size());
    diag->accepted = static_cast<long>(map.points.size()) -
                     static_cast<long>(seeds.size());
    diag->rejected = diag->candidates - diag->accepted;
  }
  return map;
}

ContactMap build_contact_map(int intent_id, const IntentViews& input,
                             const geom::MeshQuery& object,
                             const RefineConfig& cfg, Diagnostics* diag) {
  check_intent_views(input);
  if (diag) {
    for (const auto* m : input.masks)
      diag->mask_pixels += static_cast<long>(m->count());
  }
  auto refined = cross_view_refine(input, cfg);
  if (diag) {
    for (size_t i = 0; i < refined.size(); ++i) {
      for (size_t px = 0; px < refined[i].scores.size(); ++px) {
        const double gain =
            refined[i].scores[px] - input.initial_maps[i].scores[px];
        if (gain > 0) {
          ++diag->supported_pixels;
          diag->max_support = std::max(diag->max_support, gain);
        }
      }
    }
  }
  const auto normalized = normalize_global(refined);
  const ScoredCloud cloud = lift_to_3d(normalized, input.views, diag);
  if (cloud.size() == 0)
    fail(ErrorCode::empty_input, "build_contact_map: nothing lifted to 3d");
  if (diag) {
    for (const auto& p : cloud.points)
      if (!object.within_distance(p, cfg.surface_tol)) ++diag->off_surface;
  }
  const auto seeds = select_seeds(cloud, cfg, diag);
  ContactMap map = convexity_expand(cloud, seeds, object, cfg, diag);
  map.intent_id = intent_id;
  return map;
}

std::string contact_map_to_json(const ContactMap& map) {
  json j;
  j["intent_id"] = map.intent_id;
  json pts = json::array();
  for (const auto& p : map.points) pts.push_back({p.x(), p.y(), p.z()});
  j["points"] = std::move(pts);
  j["scores"] = map.scores;
  j["seed_indices"] = map.seed_indices;
  return j.dump();
}

ContactMap contact_map_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::parse, std::string("contact map: ") + e.what());
  }
  ContactMap map;
  try {
    map.intent_id = j.at("intent_id").get<int>();
    for (const auto& p : j.at("points"))
      map.points.emplace_back(p.at(0).get<double>(), p.at(1).get<double>(),
                              p.at(2).get<double>());
    map.scores = j.at("scores").get<std::vector<double>>();
    map.seed_indices = j.at("seed_indices").get<std::vector<int>>();
  } catch (const json::exception& e) {
    fail(ErrorCode::parse, std::string("contact map: ") + e.what());
  }
  if (map.scores.size() != map.points.size())
    fail(ErrorCode::shape_mismatch, "contact map: scores/points mismatch");
  for (int s : map.seed_indices)
    if (s < 0 || s >= static_cast<int>(map.points.size()))
      fail(ErrorCode::out_of_bounds, "contact map: seed index out of range");
  return map;
}

ContactMap load_contact_map(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::io, "contact map: cannot open " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  return contact_map_from_json(buf.str());
}

void save_contact_map(const ContactMap& map, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::io, "contact map: cannot write " + path);
  f << contact_map_to_json(map) << '\n';
  if (!f) fail(ErrorCode::io, "contact map: write failed for " + path);
}

void save_contact_map_ply(const ContactMap& map, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::io, "ply: cannot write " + path);
  f << "ply\nformat ascii 1.0\n"
    << "element vertex " << map.points.size() << "\n"
    << "property float x\nproperty float y\nproperty float z\n"
    << "property float confidence\nend_header\n";
  char buf[160];
  for (size_t i = 0; i < map.points.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.9g %.9g %.9g %.9g\n", map.points[i].x(),
                  map.points[i].y(), map.points[i].z(), map.scores[i]);
    f << buf;
  }
  if (!f) fail(ErrorCode::io, "ply: write failed for " + path);
}

}  // namespace graspmap::refine
