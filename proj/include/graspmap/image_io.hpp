#pragma once

#include <string>

#include "graspmap/depth_map.hpp"

namespace graspmap::geom {

// Grayscale PFM ("Pf"), float32 scalars in meters, rows stored bottom-up,
// negative scale marks little-endian. 0 encodes "no hit".
DepthMap read_pfm(const std::string& path);
void write_pfm(const DepthMap& depth, const std::string& path);

// Binary PGM ("P5", maxval 255); values >= 128 are members, written as 255.
MaskImage read_pgm(const std::string& path);
void write_pgm(const MaskImage& mask, const std::string& path);

}  // namespace graspmap::geom
