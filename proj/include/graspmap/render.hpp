#pragma once

#include "graspmap/camera.hpp"
#include "graspmap/mesh_query.hpp"

namespace graspmap::geom {

// Casts one ray through each pixel center and records the camera-frame depth
// of the nearest hit; pixels without a hit get the no-hit value (0).
DepthMap render_depth(const MeshQuery& query, const CameraView& view);
DepthMap render_depth(const TriangleMesh& mesh, const CameraView& view);

}  // namespace graspmap::geom
