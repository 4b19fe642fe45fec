#include "graspmap/camera.hpp"

#include <cmath>

namespace graspmap::geom {

void CameraIntrinsics::validate() const {
  if (width <= 0 || height <= 0)
    fail(ErrorCode::invalid_argument, "camera: non-positive image size");
  if (!(fx > 0) || !(fy > 0))
    fail(ErrorCode::invalid_argument, "camera: non-positive focal length");
  if (cx < 0 || cx > width || cy < 0 || cy > height)
    fail(ErrorCode::invalid_argument,
         "camera: principal point outside image bounds");
}

void CameraPose::validate() const {
  const Eigen::Matrix3d rtr = rotation.transpose() * rotation;
  if ((rtr - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > 1e-9)
    fail(ErrorCode::invalid_argument, "camera: rotation not orthonormal");
  if (rotation.determinant() < 0)
    fail(ErrorCode::invalid_argument, "camera: rotation is a reflection");
}

CameraPose look_at(const Eigen::Vector3d& eye, const Eigen::Vector3d& target) {
  Eigen::Vector3d forward = target - eye;
  const double len = forward.norm();
  if (len < 1e-12)
    fail(ErrorCode::degenerate_geometry, "look_at: eye equals target");
  forward /= len;

  Eigen::Vector3d up(0, 0, 1);
  if (std::abs(forward.dot(up)) > 1.0 - 1e-9) up = Eigen::Vector3d(0, 1, 0);
  const Eigen::Vector3d right = forward.cross(up).normalized();
  const Eigen::Vector3d down = forward.cross(right);

  CameraPose pose;
  pose.rotation.row(0) = right;
  pose.rotation.row(1) = down;
  pose.rotation.row(2) = forward;
  pose.translation = -(pose.rotation * eye);
  return pose;
}

Eigen::Vector3d back_project(const CameraView& view,
                             const Eigen::Vector2d& pixel, double depth) {
  if (!std::isfinite(depth) || depth <= 0)
    fail(ErrorCode::invalid_depth, "back_project: depth must be positive");
  const CameraIntrinsics& K = view.intrinsics;
  if (pixel.x() < 0 || pixel.x() > K.width || pixel.y() < 0 ||
      pixel.y() > K.height)
    fail(ErrorCode::out_of_bounds, "back_project: pixel outside image");
  const Eigen::Vector3d cam((pixel.x() - K.cx) / K.fx * depth,
                            (pixel.y() - K.cy) / K.fy * depth, depth);
  return view.pose.to_world(cam);
}

Reprojection reproject(const Eigen::Vector3d& point, const CameraView& view) {
  const Eigen::Vector3d cam = view.pose.to_camera(point);
  if (cam.z() <= 0)
    fail(ErrorCode::behind_camera, "reproject: point behind camera");
  const CameraIntrinsics& K = view.intrinsics;
  Reprojection r;
  r.pixel = {K.fx * cam.x() / cam.z() + K.cx, K.fy * cam.y() / cam.z() + K.cy};
  r.z = cam.z();
  return r;
}

double depth_consistency(const Eigen::Vector2i& pixel, const CameraView& src,
                         const CameraView& dst) {
  constexpr double kMiss = std::numeric_limits<double>::infinity();
  if (!src.depth.has(pixel.x(), pixel.y()))
    fail(ErrorCode::invalid_depth, "depth_consistency: source pixel has no depth");
  const double d = src.depth.at(pixel.x(), pixel.y());
  const Eigen::Vector3d p =
      back_project(src, pixel_center(pixel.x(), pixel.y()), d);

  Reprojection r;
  try {
    r = reproject(p, dst);
  } catch (const Error&) {
    return kMiss;  // behind the destination camera
  }
  const int ix = static_cast<int>(std::floor(r.pixel.x()));
  const int iy = static_cast<int>(std::floor(r.pixel.y()));
  if (!dst.depth.has(ix, iy)) return kMiss;
  return std::abs(static_cast<double>(dst.depth.at(ix, iy)) - r.z);
}

}  // namespace graspmap::geom
