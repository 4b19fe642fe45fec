#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "graspmap/ingest.hpp"
#include "test_support.hpp"

using namespace graspmap;
using namespace graspmap::ingest;
using testsup::code_of;

namespace {

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

const char* kProposals = R"({
  "object_id": "obj-1",
  "intents": [
    {"intent_id": 1, "part_name": "body", "description": "wrap",
     "views": [
       {"view_id": 0, "visible": true, "bbox": [10, 12, 40, 50], "confidence": 0.8},
       {"view_id": 1, "visible": false, "confidence": 0.9},
       {"view_id": 2, "bbox": [5, 5, 5, 20], "confidence": 0.7},
       {"view_id": 3, "bbox": [0, 0, 8, 8], "confidence": 1.7}
     ]},
    {"intent_id": 2, "part_name": "end", "description": "pinch",
     "views": [{"view_id": 0, "visible": false, "confidence": 0.5}]}
  ]
})";

}  // namespace

TEST_CASE("proposal loading keeps usable views and drops the rest") {
  std::string object_id;
  const auto intents = load_proposals(kProposals, &object_id);
  CHECK(object_id == "obj-1");
  // Intent 2 has no usable view and disappears entirely.
  REQUIRE(intents.size() == 1);
  const IntentProposal& intent = intents[0];
  CHECK(intent.intent_id == 1);
  CHECK(intent.part_name == "body");
  // view 1 is invisible, view 2 has a zero-width box: both dropped.
  REQUIRE(intent.views.size() == 2);
  CHECK(intent.view(0) != nullptr);
  CHECK(intent.view(1) == nullptr);
  CHECK(intent.view(2) == nullptr);
  const ViewProposal* v3 = intent.view(3);
  REQUIRE(v3 != nullptr);
  CHECK(v3->visible);               // inferred from the non-degenerate bbox
  CHECK(v3->confidence == 1.0);     // clipped into [0, 1]
  CHECK(intent.view(0)->bbox == std::array<int, 4>{10, 12, 40, 50});
}

TEST_CASE("proposal loading fails when nothing survives") {
  CHECK(code_of([] {
          load_proposals(R"({"object_id": "x", "intents": []})");
        }) == ErrorCode::empty_input);
  CHECK(code_of([] {
          load_proposals(R"({"object_id": "x", "intents": [
            {"intent_id": 1, "views": [{"view_id": 0, "visible": false,
                                        "confidence": 0.5}]}]})");
        }) == ErrorCode::empty_input);
  CHECK(code_of([] { load_proposals("not json"); }) == ErrorCode::parse);
}

TEST_CASE("mask filtering intersects with the valid-depth region") {
  geom::MaskImage mask(4, 2, 1);
  geom::DepthMap depth(4, 2, 0.f);
  depth.at(0, 0) = 0.5f;
  depth.at(2, 1) = 0.7f;
  depth.at(3, 1) = -1.f;  // invalid stays invalid
  const geom::MaskImage out = filter_mask(mask, depth);
  CHECK(out.count() == 2);
  CHECK(out.member(0, 0));
  CHECK(out.member(2, 1));
  CHECK_FALSE(out.member(3, 1));

  geom::DepthMap wrong(3, 2, 1.f);
  CHECK(code_of([&] { filter_mask(mask, wrong); }) == ErrorCode::shape_mismatch);
}

TEST_CASE("valid_region_ratio counts mask pixels inside the box") {
  geom::MaskImage mask(10, 10, 0);
  for (int y = 0; y < 5; ++y)
    for (int x = 0; x < 10; ++x) mask.at(x, y) = 1;  // top half filled

  CHECK(valid_region_ratio(mask, {0, 0, 10, 10}) == doctest::Approx(0.5));
  CHECK(valid_region_ratio(mask, {0, 0, 10, 5}) == doctest::Approx(1.0));
  CHECK(valid_region_ratio(mask, {0, 5, 10, 10}) == doctest::Approx(0.0));
  // Boxes are half-open: [2,4) x [3,6) covers rows 3..5, cols 2..3, and the
  // filled top half contributes rows 3 and 4 of those.
  CHECK(valid_region_ratio(mask, {2, 3, 4, 6}) == doctest::Approx(4.0 / 6.0));
  // Clipped against the image before counting.
  CHECK(valid_region_ratio(mask, {-5, -5, 5, 5}) == doctest::Approx(1.0));
  CHECK(code_of([&] {
          valid_region_ratio(mask, {4, 4, 4, 8});
        }) == ErrorCode::degenerate_geometry);
  CHECK(code_of([&] {
          valid_region_ratio(mask, {20, 20, 30, 30});
        }) == ErrorCode::degenerate_geometry);
}

TEST_CASE("confidence calibration applies a logistic factor to the ratio") {
  CHECK(calibrate_confidence(0.6, 0.0) == doctest::Approx(0.5 * 0.6).epsilon(1e-12));
  CHECK(calibrate_confidence(1.0, 1.0) == doctest::Approx(logistic(1.0)).epsilon(1e-12));
  CHECK(calibrate_confidence(0.0, 0.7) == 0.0);

  CalibrationOptions opts;
  opts.scale = 4.0;
  opts.bias = 0.5;
  CHECK(calibrate_confidence(0.8, 0.75, opts) ==
        doctest::Approx(logistic(4.0 * 0.25) * 0.8).epsilon(1e-12));
  // Monotone in the ratio.
  double prev = -1;
  for (double rho = 0.0; rho <= 1.0; rho += 0.05) {
    const double c = calibrate_confidence(0.9, rho, opts);
    CHECK(c > prev);
    prev = c;
  }
  CHECK(code_of([] { calibrate_confidence(1.2, 0.5); }) == ErrorCode::invalid_argument);
  CHECK(code_of([] { calibrate_confidence(0.5, -0.1); }) == ErrorCode::invalid_argument);
}

TEST_CASE("initial confidence maps put the calibrated score on mask pixels") {
  geom::MaskImage mask(3, 2, 0);
  mask.at(1, 0) = 1;
  mask.at(2, 1) = 1;
  const ConfidenceMap cm = init_confidence_map(mask, 0.42);
  CHECK(cm.width == 3);
  CHECK(cm.height == 2);
  CHECK(cm.at(1, 0) == 0.42);
  CHECK(cm.at(2, 1) == 0.42);
  CHECK(cm.at(0, 0) == 0.0);
  CHECK(cm.stage == MapStage::initial);
  CHECK(cm.max_score() == 0.42);
}
