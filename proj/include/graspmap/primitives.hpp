#pragma once

#include "graspmap/mesh.hpp"

namespace graspmap::geom {

// All generators produce watertight, consistently outward-wound meshes
// centered on the origin, dimensions in meters.

TriangleMesh make_sphere(double radius, int subdivisions = 3);
TriangleMesh make_cube(double edge);
TriangleMesh make_torus(double major_radius, double minor_radius,
                        int major_segments = 48, int minor_segments = 24);

// Two fat lobes joined by a thin neck. The lobes sit at the ends of a
// circular arc, so the neck is offset from the straight line between the two
// lobe tips; that line exits the volume, which is what makes the shape a
// useful non-convex test case.
struct DumbbellParams {
  double arc_radius = 0.075;
  double arc_half_angle = 0.87;  // radians, ~50 degrees each side
  double lobe_radius = 0.028;
  double neck_radius = 0.012;
  int path_segments = 48;
  int ring_segments = 24;
};
TriangleMesh make_dumbbell(const DumbbellParams& params = {});

// Tip points of the two dumbbell lobes (the extreme ends of the shape).
void dumbbell_tips(const DumbbellParams& params, Eigen::Vector3d& tip_a,
                   Eigen::Vector3d& tip_b);

TriangleMesh make_shape(const std::string& name);  // sphere|cube|torus|dumbbell

}  // namespace graspmap::geom
