#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "graspmap/mesh.hpp"

namespace graspmap::geom {

// Generalized winding number of `p` with respect to the mesh surface
// (solid-angle sum / 4pi). ~1 inside a consistently wound closed mesh,
// ~0 outside. O(#triangles) per call; used as the slow, independent route.
double winding_number(const TriangleMesh& mesh, const Eigen::Vector3d& p);

enum class InsideMethod {
  ray_parity,      // default; re-casts on grazing hits
  winding_number,  // brute force fallback, always available
};

// Spatial index over one mesh. Inside/distance queries require the mesh to be
// watertight; ray casts work on any triangle soup.
class MeshQuery {
 public:
  explicit MeshQuery(const TriangleMesh& mesh,
                     InsideMethod method = InsideMethod::ray_parity);

  const TriangleMesh& mesh() const { return mesh_; }

  // Strict volume membership. Points within ~1e-9 of the surface may land on
  // either side; callers that care use the surface_tol band instead.
  bool contains_point(const Eigen::Vector3d& p) const;

  // Negative inside, positive outside, magnitude = distance to the surface.
  double signed_distance(const Eigen::Vector3d& p) const;

  double distance(const Eigen::Vector3d& p) const;  // unsigned
  bool within_distance(const Eigen::Vector3d& p, double tol) const;

  // Index of the triangle closest to p.
  int closest_triangle(const Eigen::Vector3d& p) const;

  // True iff every one of `samples` points on the uniform interior grid
  // lambda = i/(samples+1), i = 1..samples, of the segment q1 -> q2 is inside
  // the volume or within surface_tol of the surface. Endpoints are excluded.
  bool segment_inside(const Eigen::Vector3d& q1, const Eigen::Vector3d& q2,
                      int samples = 16, double surface_tol = 1e-3) const;

  // Nearest ray hit with t in (t_min, +inf); returns t or +inf on miss.
  // `dir` need not be normalized; t is in units of |dir|.
  double ray_nearest(const Eigen::Vector3d& origin, const Eigen::Vector3d& dir,
                     double t_min = 0.0) const;

 private:
  struct Node {
    Eigen::Vector3d lo, hi;
    int left = -1, right = -1;  // internal
    int first = 0, count = 0;   // leaf triangle range
  };

  int build(std::vector<int>& order, int first, int count,
            const std::vector<Eigen::Vector3d>& centroids);
  bool parity_cast(const Eigen::Vector3d& origin, const Eigen::Vector3d& dir,
                   bool& odd) const;
  double closest_sq(const Eigen::Vector3d& p, int* tri_out) const;

  TriangleMesh mesh_;
  InsideMethod method_;
  std::vector<Node> nodes_;
  std::vector<int> tri_order_;
  std::vector<Eigen::Vector3d> dirs_;  // fixed pseudo-random cast directions
  double scale_ = 1.0;                 // bounding diagonal
};

// Deterministic area-weighted surface sampling. Throws empty_input on an
// empty mesh, invalid_argument when count <= 0.
std::vector<Eigen::Vector3d> surface_sample(const TriangleMesh& mesh,
                                            int count, uint64_t seed);

}  // namespace graspmap::geom
