#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

#include "graspmap/error.hpp"

namespace graspmap::geom {

struct TriangleMesh {
  std::vector<Eigen::Vector3d> vertices;
  std::vector<std::array<int, 3>> triangles;
  bool watertight = false;

  bool empty() const { return triangles.empty(); }

  Eigen::Vector3d vertex(int tri, int corner) const {
    return vertices[triangles[tri][corner]];
  }
  Eigen::Vector3d triangle_normal(int tri) const;  // unnormalized (2x area)

  void bounding_box(Eigen::Vector3d& lo, Eigen::Vector3d& hi) const;
  double bounding_diagonal() const;
};

// Every directed edge must be matched by its reverse exactly once; this
// implies closed, 2-manifold and consistently wound.
bool check_watertight(const TriangleMesh& mesh);

// ASCII OBJ subset: v and triangulated f records, indices 1-based, optional
// v/vt/vn syntax (only the vertex index is used). Throws parse with the line
// number on malformed input, io when the file cannot be opened.
TriangleMesh load_obj(const std::string& path);
TriangleMesh parse_obj(const std::string& text);
void save_obj(const TriangleMesh& mesh, const std::string& path);

}  // namespace graspmap::geom
