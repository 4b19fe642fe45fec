#include "graspmap/render.hpp"

namespace graspmap::geom {

DepthMap render_depth(const MeshQuery& query, const CameraView& view) {
  const CameraIntrinsics& K = view.intrinsics;
  K.validate();
  view.pose.validate();
  DepthMap depth(K.width, K.height, 0.f);
  if (query.mesh().empty()) return depth;

  const Eigen::Matrix3d r_t = view.pose.rotation.transpose();
  const Eigen::Vector3d origin = view.pose.center();
  for (int y = 0; y < K.height; ++y) {
    for (int x = 0; x < K.width; ++x) {
      // Direction scaled so the ray parameter equals camera-frame depth.
      const Eigen::Vector3d dir_cam((x + 0.5 - K.cx) / K.fx,
                                    (y + 0.5 - K.cy) / K.fy, 1.0);
      const double t = query.ray_nearest(origin, r_t * dir_cam, 0.0);
      if (std::isfinite(t)) depth.at(x, y) = static_cast<float>(t);
    }
  }
  return depth;
}

DepthMap render_depth(const TriangleMesh& mesh, const CameraView& view) {
  if (mesh.empty()) {
    view.intrinsics.validate();
    return DepthMap(view.intrinsics.width, view.intrinsics.height, 0.f);
  }
  return render_depth(MeshQuery(mesh), view);
}

}  // namespace graspmap::geom
