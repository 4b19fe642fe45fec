#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>

#include "graspmap/primitives.hpp"
#include "graspmap/refine.hpp"
#include "test_support.hpp"

using namespace graspmap;
using namespace graspmap::refine;
using testsup::code_of;

namespace {

std::filesystem::path temp_dir() {
  auto dir = std::filesystem::temp_directory_path() / "graspmap_test_refine";
  std::filesystem::create_directories(dir);
  return dir;
}

ScoredCloud cloud_from(const std::vector<Eigen::Vector3d>& pts,
                       const std::vector<double>& scores) {
  ScoredCloud c;
  c.points = pts;
  c.scores = scores;
  for (size_t i = 0; i < pts.size(); ++i)
    c.provenance.push_back({0, static_cast<int>(i), 0});
  return c;
}

}  // namespace

TEST_CASE("cross-view support adds alpha * confidence on agreement only") {
  const auto fx = testsup::make_two_view_sphere();
  RefineConfig cfg;  // alpha 0.5, tau 0.01
  const auto refined = cross_view_refine(fx.input(), cfg);
  REQUIRE(refined.size() == 2);

  const auto& r0 = refined[0];
  const double expected_gain = cfg.alpha * fx.conf;  // 0.5 * 0.6
  const double agree = r0.at(fx.pix_agree.x(), fx.pix_agree.y());
  CHECK(agree == doctest::Approx(fx.s0 + expected_gain).epsilon(1e-12));
  // The far-side pixel reprojects onto the near surface of view 1: depth
  // disagrees by the sphere's thickness, so the score must stay untouched.
  const double occluded = r0.at(fx.pix_occluded.x(), fx.pix_occluded.y());
  CHECK(occluded == fx.s0);
  CHECK(r0.stage == ingest::MapStage::refined);
}

TEST_CASE("support is capped by the number of agreeing neighbors") {
  const auto fx = testsup::make_two_view_sphere();
  RefineConfig cfg;
  const auto refined = cross_view_refine(fx.input(), cfg);
  const double max_gain = cfg.alpha * fx.conf;
  for (int y = 0; y < refined[0].height; ++y)
    for (int x = 0; x < refined[0].width; ++x) {
      if (!fx.masks[0].member(x, y)) {
        CHECK(refined[0].at(x, y) == 0.0);
        continue;
      }
      const double v = refined[0].at(x, y);
      CHECK(v >= fx.s0);
      CHECK(v <= fx.s0 + max_gain + 1e-12);
    }
}

TEST_CASE("global normalization divides by the single maximum across views") {
  std::vector<ingest::ConfidenceMap> maps;
  maps.emplace_back(2, 1, ingest::MapStage::refined);
  maps.emplace_back(2, 1, ingest::MapStage::refined);
  maps[0].at(0, 0) = 0.2;
  maps[0].at(1, 0) = 0.8;
  maps[1].at(0, 0) = 1.6;  // global maximum lives in view 1
  const auto out = normalize_global(maps);
  CHECK(out[0].at(0, 0) == doctest::Approx(0.125));
  CHECK(out[0].at(1, 0) == doctest::Approx(0.5));
  CHECK(out[1].at(0, 0) == doctest::Approx(1.0));
  CHECK(out[1].stage == ingest::MapStage::normalized);

  std::vector<ingest::ConfidenceMap> zeros;
  zeros.emplace_back(2, 2, ingest::MapStage::refined);
  CHECK(code_of([&] { normalize_global(zeros); }) == ErrorCode::degenerate_geometry);
  CHECK(code_of([] {
          normalize_global(std::vector<ingest::ConfidenceMap>{});
        }) == ErrorCode::empty_input);
}

TEST_CASE("lifting walks views in ascending id order, pixels row-major") {
  auto fx = testsup::make_two_view_sphere();
  // Swap the stored order; lift must still emit view 0 first.
  std::swap(fx.views[0], fx.views[1]);
  std::swap(fx.masks[0], fx.masks[1]);
  std::swap(fx.initial[0], fx.initial[1]);

  std::vector<const geom::CameraView*> views{&fx.views[0], &fx.views[1]};
  Diagnostics diag;
  const ScoredCloud cloud = lift_to_3d(fx.initial, views, &diag);
  REQUIRE(cloud.size() > 0);
  CHECK(static_cast<long>(cloud.size()) == diag.lifted_points);

  int last_view = -1;
  long last_pixel = -1;
  for (const auto& prov : cloud.provenance) {
    if (prov.view_id != last_view) {
      CHECK(prov.view_id > last_view);
      last_view = prov.view_id;
      last_pixel = -1;
    }
    const long flat = static_cast<long>(prov.py) * 1000 + prov.px;
    CHECK(flat > last_pixel);
    last_pixel = flat;
  }
  CHECK(last_view == 1);

  // Every lifted point sits on the rendered surface of its source view.
  const geom::MeshQuery query(fx.mesh);
  for (size_t i = 0; i < cloud.size(); i += 97)
    CHECK(query.distance(cloud.points[i]) <= 2e-3);
}

TEST_CASE("pixels with score but no depth are skipped and counted") {
  auto fx = testsup::make_two_view_sphere();
  // Give a non-surface pixel a positive score: no depth -> not lifted.
  int bx = -1, by = -1;
  for (int y = 0; y < fx.views[0].depth.height && bx < 0; ++y)
    for (int x = 0; x < fx.views[0].depth.width && bx < 0; ++x)
      if (!fx.views[0].depth.has(x, y)) {
        bx = x;
        by = y;
      }
  REQUIRE(bx >= 0);
  fx.initial[0].at(bx, by) = 0.9;
  std::vector<const geom::CameraView*> views{&fx.views[0], &fx.views[1]};
  Diagnostics diag;
  lift_to_3d(fx.initial, views, &diag);
  CHECK(diag.skipped_no_depth == 1);
}

TEST_CASE("seed selection takes the top score fraction with stable ties") {
  ScoredCloud cloud = cloud_from(
      {{0, 0, 0}, {0.001, 0, 0}, {0.002, 0, 0}, {0.003, 0, 0}, {0.004, 0, 0},
       {0.005, 0, 0}, {0.006, 0, 0}, {0.007, 0, 0}, {0.008, 0, 0}, {0.009, 0, 0},
       {0.010, 0, 0}, {0.011, 0, 0}},
      {0.1, 0.2, 0.9, 0.9, 0.3, 0.4, 0.5, 0.6, 0.65, 0.7, 0.75, 0.8});
  RefineConfig cfg;
  cfg.seed_component = false;
  SUBCASE("ceil of the fraction") {
    // 12 points, fraction 0.10 -> ceil(1.2) = 2 seeds.
    const auto seeds = select_seeds(cloud, cfg);
    REQUIRE(seeds.size() == 2);
    // The two 0.9 scores tie; earlier provenance (lower pixel) wins the order
    // but both are selected here.
    CHECK(seeds[0] == 2);
    CHECK(seeds[1] == 3);
  }
  SUBCASE("tie broken by provenance") {
    cfg.seed_fraction = 1.0 / 12.0;  // exactly one seed
    const auto seeds = select_seeds(cloud, cfg);
    REQUIRE(seeds.size() == 1);
    CHECK(seeds[0] == 2);
  }
  SUBCASE("empty cloud") {
    CHECK(code_of([&] {
            select_seeds(ScoredCloud{}, cfg);
          }) == ErrorCode::empty_input);
  }
}

TEST_CASE("seed component filter keeps only the largest cluster") {
  // Eight high-score points: five packed near the origin, three packed at a
  // distance far beyond the component radius.
  std::vector<Eigen::Vector3d> pts;
  std::vector<double> scores;
  for (int i = 0; i < 5; ++i) {
    pts.push_back({0.001 * i, 0, 0});
    scores.push_back(1.0);
  }
  for (int i = 0; i < 3; ++i) {
    pts.push_back({0.5 + 0.001 * i, 0, 0});
    scores.push_back(1.0);
  }
  // Filler so the fraction picks exactly the eight high scores.
  for (int i = 0; i < 72; ++i) {
    pts.push_back({0.001 * i, 0.01, 0});
    scores.push_back(0.1);
  }
  ScoredCloud cloud = cloud_from(pts, scores);
  RefineConfig cfg;  // seed_component on, radius from median spacing
  Diagnostics diag;
  const auto seeds = select_seeds(cloud, cfg, &diag);
  CHECK(diag.seeds_selected == 8);
  CHECK(diag.seeds_after_component == 5);
  REQUIRE(seeds.size() == 5);
  for (int s : seeds) CHECK(s < 5);
}

TEST_CASE("convex expansion keeps seeds and sight-line-connected points") {
  const geom::TriangleMesh mesh = geom::make_sphere(0.05, 3);
  const geom::MeshQuery query(mesh);
  // Surface points: seeds on one side, candidates all over; on a convex body
  // every pair connects, so everything must be kept.
  const auto pts = geom::surface_sample(mesh, 400, 5);
  std::vector<double> scores(pts.size(), 0.5);
  ScoredCloud cloud = cloud_from(pts, scores);
  RefineConfig cfg;
  Diagnostics diag;
  const ContactMap map = convexity_expand(cloud, {0, 1, 2}, query, cfg, &diag);
  CHECK(map.points.size() == cloud.size());
  CHECK(diag.rejected == 0);
  CHECK(map.seed_indices == std::vector<int>{0, 1, 2});
  for (size_t i = 0; i < map.points.size(); ++i) {
    CHECK(map.points[i] == cloud.points[i]);
    CHECK(map.scores[i] == cloud.scores[i]);
  }
}

TEST_CASE("convex expansion drops points whose seed sight-lines all exit") {
  geom::DumbbellParams params;
  const geom::MeshQuery query(geom::make_dumbbell(params));
  Eigen::Vector3d tip_a, tip_b;
  geom::dumbbell_tips(params, tip_a, tip_b);

  ScoredCloud cloud = cloud_from({tip_a, tip_b}, {1.0, 0.9});
  RefineConfig cfg;
  Diagnostics diag;
  SUBCASE("cross-lobe candidate rejected") {
    // Seed only in lobe A; the lobe-B tip cannot see it from inside.
    const ContactMap map = convexity_expand(cloud, {0}, query, cfg, &diag);
    REQUIRE(map.points.size() == 1);
    CHECK(map.points[0] == tip_a);
    CHECK(diag.rejected == 1);
  }
  SUBCASE("seeds survive even when mutually disconnected") {
    const ContactMap map = convexity_expand(cloud, {0, 1}, query, cfg, &diag);
    CHECK(map.points.size() == 2);
    CHECK_FALSE(query.segment_inside(map.points[0], map.points[1],
                                     cfg.convexity_samples, cfg.surface_tol));
  }
  SUBCASE("bad seed index") {
    CHECK(code_of([&] {
            convexity_expand(cloud, {5}, query, cfg);
          }) == ErrorCode::out_of_bounds);
  }
  SUBCASE("no seeds") {
    CHECK(code_of([&] {
            convexity_expand(cloud, {}, query, cfg);
          }) == ErrorCode::empty_input);
  }
}

TEST_CASE("expansion remaps seed indices to the output order") {
  const geom::MeshQuery query(geom::make_sphere(0.05, 3));
  const auto pts = geom::surface_sample(query.mesh(), 50, 9);
  std::vector<double> scores(pts.size(), 0.4);
  ScoredCloud cloud = cloud_from(pts, scores);
  const ContactMap map = convexity_expand(cloud, {7, 3}, query, RefineConfig{});
  REQUIRE(map.points.size() == cloud.size());
  // Output preserves input order, so the seed list is the sorted pair.
  CHECK(map.seed_indices == std::vector<int>{3, 7});
}

TEST_CASE("full refinement is deterministic across repeat runs and threads") {
  const auto fx = testsup::make_two_view_sphere();
  const geom::MeshQuery query(fx.mesh);
  RefineConfig cfg;
  Diagnostics d1, d2;
  const ContactMap a = build_contact_map(3, fx.input(), query, cfg, &d1);
  const ContactMap b = build_contact_map(3, fx.input(), query, cfg, &d2);
  CHECK(a.intent_id == 3);
  CHECK(contact_map_to_json(a) == contact_map_to_json(b));
  CHECK(d1.lifted_points == d2.lifted_points);
  CHECK(d1.accepted == d2.accepted);

  RefineConfig threaded = cfg;
  threaded.threads = 4;
  const ContactMap c = build_contact_map(3, fx.input(), query, threaded);
  CHECK(contact_map_to_json(a) == contact_map_to_json(c));
}

TEST_CASE("refinement on a convex body keeps every lifted point") {
  const auto fx = testsup::make_two_view_sphere();
  const geom::MeshQuery query(fx.mesh);
  Diagnostics diag;
  const ContactMap map = build_contact_map(1, fx.input(), query, RefineConfig{}, &diag);
  CHECK(diag.rejected == 0);
  CHECK(static_cast<long>(map.points.size()) == diag.lifted_points);
  CHECK(diag.off_surface == 0);
}

TEST_CASE("contact maps round-trip through JSON and write valid PLY") {
  ContactMap map;
  map.intent_id = 4;
  map.points = {{0.01, -0.02, 0.03}, {0.123456789012345, 0, -1e-7}};
  map.scores = {0.25, 1.0};
  map.seed_indices = {1};
  const std::string text = contact_map_to_json(map);
  const ContactMap back = contact_map_from_json(text);
  CHECK(back.intent_id == map.intent_id);
  REQUIRE(back.points.size() == 2);
  for (int i = 0; i < 2; ++i) {
    CHECK(back.points[i] == map.points[i]);  // bit-exact round trip
    CHECK(back.scores[i] == map.scores[i]);
  }
  CHECK(back.seed_indices == map.seed_indices);
  CHECK(contact_map_to_json(back) == text);

  const auto json_path = (temp_dir() / "map.json").string();
  const auto ply_path = (temp_dir() / "map.ply").string();
  save_contact_map(map, json_path);
  const ContactMap loaded = load_contact_map(json_path);
  CHECK(contact_map_to_json(loaded) == text);

  save_contact_map_ply(map, ply_path);
  std::ifstream ply(ply_path);
  std::string first;
  std::getline(ply, first);
  CHECK(first == "ply");
  std::string body((std::istreambuf_iterator<char>(ply)),
                   std::istreambuf_iterator<char>());
  CHECK(body.find("element vertex 2") != std::string::npos);
  CHECK(body.find("property float confidence") != std::string::npos);

  CHECK(code_of([] { contact_map_from_json("{"); }) == ErrorCode::parse);
  CHECK(code_of([] { load_contact_map("/nonexistent.json"); }) == ErrorCode::io);
}
