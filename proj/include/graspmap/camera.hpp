#pragma once

#include <Eigen/Dense>

#include "graspmap/depth_map.hpp"
#include "graspmap/error.hpp"

namespace graspmap::geom {

// Pinhole model. Image origin is the top-left pixel corner, x right, y down;
// pixel (i, j) covers [i, i+1) x [j, j+1) and its center is (i+0.5, j+0.5).
struct CameraIntrinsics {
  double fx = 0, fy = 0, cx = 0, cy = 0;
  int width = 0, height = 0;

  void validate() const;
};

// Rigid world-to-camera transform: p_cam = rotation * p_world + translation.
// Camera frame: +Z forward, +X image right, +Y image down.
struct CameraPose {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  void validate() const;  // orthonormal within 1e-9 and det +1

  Eigen::Vector3d to_camera(const Eigen::Vector3d& p) const {
    return rotation * p + translation;
  }
  Eigen::Vector3d to_world(const Eigen::Vector3d& p) const {
    return rotation.transpose() * (p - translation);
  }
  Eigen::Vector3d center() const {
    return -(rotation.transpose() * translation);
  }
};

struct CameraView {
  int view_id = 0;
  CameraIntrinsics intrinsics;
  CameraPose pose;
  DepthMap depth;  // may be empty when the view is only used for projection
};

// Camera placed at `eye` looking at `target`, world +Z treated as up.
CameraPose look_at(const Eigen::Vector3d& eye, const Eigen::Vector3d& target);

// Lifts a continuous pixel coordinate with known depth to a world point.
// Throws invalid_depth for non-positive/non-finite depth and out_of_bounds
// when the pixel lies outside [0,w] x [0,h].
Eigen::Vector3d back_project(const CameraView& view,
                             const Eigen::Vector2d& pixel, double depth);

struct Reprojection {
  Eigen::Vector2d pixel;  // continuous coordinates
  double z = 0;           // camera-frame depth
};

// Projects a world point into the view. Throws behind_camera when the point
// has non-positive camera depth. The pixel may fall outside the image.
Reprojection reproject(const Eigen::Vector3d& point, const CameraView& view);

// |observed depth at the reprojected pixel - predicted depth| for the source
// pixel carried into the destination view. Returns +inf when the reprojection
// leaves the destination image, lands on a pixel without depth, or ends up
// behind the destination camera. Throws invalid_depth when the source pixel
// itself has no depth.
double depth_consistency(const Eigen::Vector2i& pixel, const CameraView& src,
                         const CameraView& dst);

inline Eigen::Vector2d pixel_center(int x, int y) {
  return {x + 0.5, y + 0.5};
}

}  // namespace graspmap::geom
