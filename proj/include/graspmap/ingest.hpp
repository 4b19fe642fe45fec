#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "graspmap/depth_map.hpp"

namespace graspmap::ingest {

// One grasp-intent proposal over a set of views. Boxes are integer pixel
// rectangles, half-open: [x0, x1) x [y0, y1).
struct ViewProposal {
  int view_id = 0;
  bool visible = false;
  std::array<int, 4> bbox = {0, 0, 0, 0};  // x0, y0, x1, y1
  double confidence = 0;                   // clipped to [0, 1] on load
};

struct IntentProposal {
  int intent_id = 0;
  std::string part_name;
  std::string description;
  std::vector<ViewProposal> views;

  const ViewProposal* view(int view_id) const;
};

// Parses a proposal document:
//   {"object_id": ..., "intents": [{"intent_id", "part_name", "description",
//    "views": [{"view_id", "visible"?, "bbox"?, "confidence"}]}]}
// Confidences are clipped to [0, 1]. A view entry whose bbox is degenerate
// (or missing while marked visible) is dropped; an intent with no usable
// views is dropped; zero surviving intents is an empty_input error.
// "visible" defaults to the presence of a non-degenerate bbox.
std::vector<IntentProposal> load_proposals(const std::string& json_text,
                                           std::string* object_id = nullptr);
std::vector<IntentProposal> load_proposals_file(const std::string& path,
                                                std::string* object_id = nullptr);

// Intersects a raw mask with the valid-depth region. Dimensions must match.
geom::MaskImage filter_mask(const geom::MaskImage& mask,
                            const geom::DepthMap& depth);

// Fraction of bbox pixels covered by the mask; the bbox is clipped to the
// image. Throws degenerate_geometry for an empty (clipped) box.
double valid_region_ratio(const geom::MaskImage& mask,
                          const std::array<int, 4>& bbox);

// Optional affine reshaping of the ratio before the logistic squash.
struct CalibrationOptions {
  double scale = 1.0;
  double bias = 0.0;
};

// Geometry-calibrated confidence: logistic(scale * (ratio - bias)) * conf.
// Inputs are range-checked to [0, 1].
double calibrate_confidence(double confidence, double ratio,
                            const CalibrationOptions& opts = {});

enum class MapStage { initial, refined, normalized };

// Dense per-pixel scores for one (view, intent), same grid as the mask.
struct ConfidenceMap {
  int width = 0;
  int height = 0;
  std::vector<double> scores;
  MapStage stage = MapStage::initial;

  ConfidenceMap() = default;
  ConfidenceMap(int w, int h, MapStage s = MapStage::initial)
      : width(w), height(h), scores(static_cast<size_t>(w) * h, 0.0), stage(s) {}
  double& at(int x, int y) { return scores[static_cast<size_t>(y) * width + x]; }
  double at(int x, int y) const {
    return scores[static_cast<size_t>(y) * width + x];
  }
  double max_score() const;
};

// Initial map: calibrated confidence on mask pixels, zero elsewhere.
ConfidenceMap init_confidence_map(const geom::MaskImage& mask,
                                  double calibrated_confidence);

}  // namespace graspmap::ingest
