#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "graspmap/error.hpp"

namespace graspmap::geom {

// Dense per-pixel depth along the camera +Z axis, meters. A value that is
// zero, negative or non-finite means "no surface hit at this pixel".
struct DepthMap {
  int width = 0;
  int height = 0;
  std::vector<float> values;  // row-major, top-left origin

  DepthMap() = default;
  DepthMap(int w, int h, float fill = 0.f)
      : width(w), height(h), values(static_cast<size_t>(w) * h, fill) {}

  bool empty() const { return width == 0 || height == 0; }
  bool in_bounds(int x, int y) const {
    return x >= 0 && x < width && y >= 0 && y < height;
  }
  float& at(int x, int y) { return values[static_cast<size_t>(y) * width + x]; }
  float at(int x, int y) const {
    return values[static_cast<size_t>(y) * width + x];
  }
  static bool valid_value(float d) { return std::isfinite(d) && d > 0.f; }
  bool has(int x, int y) const {
    return in_bounds(x, y) && valid_value(at(x, y));
  }
};

// Binary 0/1 image, row-major, top-left origin. 1 = member.
struct MaskImage {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> values;

  MaskImage() = default;
  MaskImage(int w, int h, uint8_t fill = 0)
      : width(w), height(h), values(static_cast<size_t>(w) * h, fill) {}

  bool empty() const { return width == 0 || height == 0; }
  bool in_bounds(int x, int y) const {
    return x >= 0 && x < width && y >= 0 && y < height;
  }
  uint8_t& at(int x, int y) {
    return values[static_cast<size_t>(y) * width + x];
  }
  uint8_t at(int x, int y) const {
    return values[static_cast<size_t>(y) * width + x];
  }
  bool member(int x, int y) const { return in_bounds(x, y) && at(x, y) != 0; }
  size_t count() const {
    size_t n = 0;
    for (uint8_t v : values) n += (v != 0);
    return n;
  }
};

}  // namespace graspmap::geom
