#include "graspmap/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace graspmap::ingest {

using nlohmann::json;

const ViewProposal* IntentProposal::view(int view_id) const {
  for (const auto& v : views)
    if (v.view_id == view_id) return &v;
  return nullptr;
}

namespace {

bool bbox_degenerate(const std::array<int, 4>& b) {
  return b[2] <= b[0] || b[3] <= b[1];
}

std::array<int, 4> read_bbox(const json& j) {
  if (!j.is_array() || j.size() != 4)
    graspmap::fail(graspmap::ErrorCode::parse,
                   "proposals: bbox must be [x0, y0, x1, y1]");
  std::array<int, 4> b;
  for (int k = 0; k < 4; ++k)
    b[k] = static_cast<int>(std::llround(j[k].get<double>()));
  return b;
}

}  // namespace

std::vector<IntentProposal> load_proposals(const std::string& json_text,
                                           std::string* object_id) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    graspmap::fail(graspmap::ErrorCode::parse,
                   std::string("proposals: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("intents") ||
      !doc["intents"].is_array())
    graspmap::fail(graspmap::ErrorCode::parse,
                   "proposals: document needs an 'intents' array");
  if (object_id) *object_id = doc.value("object_id", std::string());

  std::vector<IntentProposal> intents;
  for (const auto& ij : doc["intents"]) {
    IntentProposal intent;
    if (!ij.contains("intent_id"))
      graspmap::fail(graspmap::ErrorCode::parse,
                     "proposals: intent without intent_id");
    intent.intent_id = ij["intent_id"].get<int>();
    intent.part_name = ij.value("part_name", std::string());
    intent.description = ij.value("description", std::string());

    for (const auto& vj : ij.value("views", json::array())) {
      ViewProposal view;
      if (!vj.contains("view_id"))
        graspmap::fail(graspmap::ErrorCode::parse,
                       "proposals: view entry without view_id");
      view.view_id = vj["view_id"].get<int>();
      const bool has_bbox = vj.contains("bbox") && !vj["bbox"].is_null();
      if (has_bbox) view.bbox = read_bbox(vj["bbox"]);
      // Visibility defaults to "a usable box was predicted".
      view.visible = vj.value("visible", has_bbox && !bbox_degenerate(view.bbox));
      view.confidence =
          std::clamp(vj.value("confidence", 0.0), 0.0, 1.0);
      if (!view.visible) continue;
      if (!has_bbox || bbox_degenerate(view.bbox)) continue;  // drop entry
      intent.views.push_back(view);
    }
    if (!intent.views.empty()) intents.push_back(std::move(intent));
  }
  if (intents.empty())
    graspmap::fail(graspmap::ErrorCode::empty_input,
                   "proposals: no usable intents in document");
  return intents;
}

std::vector<IntentProposal> load_proposals_file(const std::string& path,
                                                std::string* object_id) {
  std::ifstream f(path, std::ios::binary);
  if (!f) graspmap::fail(graspmap::ErrorCode::io,
                         "proposals: cannot open " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  return load_proposals(buf.str(), object_id);
}

geom::MaskImage filter_mask(const geom::MaskImage& mask,
                            const geom::DepthMap& depth) {
  if (mask.width != depth.width || mask.height != depth.height)
    graspmap::fail(graspmap::ErrorCode::shape_mismatch,
                   "filter_mask: mask and depth dimensions differ");
  geom::MaskImage out(mask.width, mask.height);
  for (int y = 0; y < mask.height; ++y)
    for (int x = 0; x < mask.width; ++x)
      out.at(x, y) = mask.at(x, y) && depth.has(x, y);
  return out;
}

double valid_region_ratio(const geom::MaskImage& mask,
                          const std::array<int, 4>& bbox) {
  const int x0 = std::max(bbox[0], 0);
  const int y0 = std::max(bbox[1], 0);
  const int x1 = std::min(bbox[2], mask.width);
  const int y1 = std::min(bbox[3], mask.height);
  if (x1 <= x0 || y1 <= y0)
    graspmap::fail(graspmap::ErrorCode::degenerate_geometry,
                   "valid_region_ratio: degenerate bbox");
  long covered = 0;
  for (int y = y0; y < y1; ++y)
    for (int x = x0; x < x1; ++x) covered += mask.at(x, y) != 0;
  return static_cast<double>(covered) /
         (static_cast<double>(x1 - x0) * (y1 - y0));
}

double calibrate_confidence(double confidence, double ratio,
                            const CalibrationOptions& opts) {
  if (!(confidence >= 0 && confidence <= 1))
    graspmap::fail(graspmap::ErrorCode::invalid_argument,
                   "calibrate_confidence: confidence outside [0, 1]");
  if (!(ratio >= 0 && ratio <= 1))
    graspmap::fail(graspmap::ErrorCode::invalid_argument,
                   "calibrate_confidence: ratio outside [0, 1]");
  const double x = opts.scale * (ratio - opts.bias);
  return confidence / (1.0 + std::exp(-x));
}

double ConfidenceMap::max_score() const {
  double m = 0;
  for (double s : scores) m = std::max(m, s);
  return m;
}

ConfidenceMap init_confidence_map(const geom::MaskImage& mask,
                                  double calibrated_confidence) {
  if (mask.empty())
    graspmap::fail(graspmap::ErrorCode::empty_input,
                   "init_confidence_map: empty mask");
  ConfidenceMap map(mask.width, mask.height, MapStage::initial);
  for (int y = 0; y < mask.height; ++y)
    for (int x = 0; x < mask.width; ++x)
      if (mask.at(x, y)) map.at(x, y) = calibrated_confidence;
  return map;
}

}  // namespace graspmap::ingest
