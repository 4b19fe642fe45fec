#pragma once

#include <cstdint>
#include <string>

namespace graspmap {

// Generator for self-contained test bundles: an origin-centered primitive,
// a ring of cameras, rendered depth, silhouette-derived masks and proposals,
// a five-finger hand document, and a default config.
struct SynthOptions {
  std::string shape = "sphere";  // sphere | cube | torus | dumbbell
  int resolution = 128;
  std::uint64_t seed = 0;  // jitters proposal confidences
  int view_count = 4;
  double distance = 0.35;   // camera distance from the origin, meters
  double elevation = 0.2;   // camera elevation angle, radians
};

// Writes a complete bundle into out_dir (created if needed) and returns the
// manifest path.
std::string synth_bundle(const SynthOptions& opts, const std::string& out_dir);

}  // namespace graspmap
