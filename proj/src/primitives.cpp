#include "graspmap/primitives.hpp"

#include <cmath>
#include <map>

namespace graspmap::geom {

namespace {

int midpoint(std::map<std::pair<int, int>, int>& cache,
             std::vector<Eigen::Vector3d>& vertices, int a, int b) {
  const auto key = std::minmax(a, b);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  const int idx = static_cast<int>(vertices.size());
  vertices.push_back((vertices[a] + vertices[b]).normalized());
  cache[key] = idx;
  return idx;
}

// Closed tube around a piecewise path with per-station radius. Stations must
// start and end with radius 0 (the apex points); interior stations form rings.
TriangleMesh sweep_tube(const std::vector<Eigen::Vector3d>& centers,
                        const std::vector<Eigen::Vector3d>& normals,
                        const Eigen::Vector3d& binormal,
                        const std::vector<double>& radii, int segments) {
  TriangleMesh mesh;
  const int n = static_cast<int>(centers.size());
  std::vector<int> ring_start(n, -1);
  for (int i = 0; i < n; ++i) {
    if (radii[i] <= 0) {
      ring_start[i] = static_cast<int>(mesh.vertices.size());
      mesh.vertices.push_back(centers[i]);
      continue;
    }
    ring_start[i] = static_cast<int>(mesh.vertices.size());
    for (int j = 0; j < segments; ++j) {
      const double a = 2.0 * M_PI * j / segments;
      mesh.vertices.push_back(centers[i] + radii[i] * (std::cos(a) * normals[i] +
                                                       std::sin(a) * binormal));
    }
  }
  for (int i = 0; i + 1 < n; ++i) {
    const bool apex_a = radii[i] <= 0;
    const bool apex_b = radii[i + 1] <= 0;
    for (int j = 0; j < segments; ++j) {
      const int jn = (j + 1) % segments;
      if (apex_a) {
        mesh.triangles.push_back(
            {ring_start[i], ring_start[i + 1] + jn, ring_start[i + 1] + j});
      } else if (apex_b) {
        mesh.triangles.push_back(
            {ring_start[i] + j, ring_start[i] + jn, ring_start[i + 1]});
      } else {
        mesh.triangles.push_back(
            {ring_start[i] + j, ring_start[i] + jn, ring_start[i + 1] + j});
        mesh.triangles.push_back(
            {ring_start[i] + jn, ring_start[i + 1] + jn, ring_start[i + 1] + j});
      }
    }
  }
  mesh.watertight = check_watertight(mesh);
  return mesh;
}

}  // namespace

TriangleMesh make_sphere(double radius, int subdivisions) {
  if (radius <= 0)
    fail(ErrorCode::invalid_argument, "make_sphere: radius must be positive");
  // icosahedron, then midpoint subdivision projected to the unit sphere
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  TriangleMesh mesh;
  mesh.vertices = {{-1, t, 0},  {1, t, 0},  {-1, -t, 0}, {1, -t, 0},
                   {0, -1, t},  {0, 1, t},  {0, -1, -t}, {0, 1, -t},
                   {t, 0, -1},  {t, 0, 1},  {-t, 0, -1}, {-t, 0, 1}};
  for (auto& v : mesh.vertices) v.normalize();
  mesh.triangles = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10},
                    {0, 10, 11}, {1, 5, 9},  {5, 11, 4},  {11, 10, 2},
                    {10, 7, 6},  {7, 1, 8},  {3, 9, 4},   {3, 4, 2},
                    {3, 2, 6},   {3, 6, 8},  {3, 8, 9},   {4, 9, 5},
                    {2, 4, 11},  {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<int, int>, int> cache;
    std::vector<std::array<int, 3>> next;
    next.reserve(mesh.triangles.size() * 4);
    for (const auto& tri : mesh.triangles) {
      const int ab = midpoint(cache, mesh.vertices, tri[0], tri[1]);
      const int bc = midpoint(cache, mesh.vertices, tri[1], tri[2]);
      const int ca = midpoint(cache, mesh.vertices, tri[2], tri[0]);
      next.push_back({tri[0], ab, ca});
      next.push_back({tri[1], bc, ab});
      next.push_back({tri[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    mesh.triangles = std::move(next);
  }
  for (auto& v : mesh.vertices) v *= radius;
  mesh.watertight = check_watertight(mesh);
  return mesh;
}

TriangleMesh make_cube(double edge) {
  if (edge <= 0)
    fail(ErrorCode::invalid_argument, "make_cube: edge must be positive");
  const double h = edge / 2;
  TriangleMesh mesh;
  mesh.vertices = {{-h, -h, -h}, {h, -h, -h}, {h, h, -h}, {-h, h, -h},
                   {-h, -h, h},  {h, -h, h},  {h, h, h},  {-h, h, h}};
  mesh.triangles = {{0, 2, 1}, {0, 3, 2},   // -z
                    {4, 5, 6}, {4, 6, 7},   // +z
                    {0, 1, 5}, {0, 5, 4},   // -y
                    {2, 3, 7}, {2, 7, 6},   // +y
                    {1, 2, 6}, {1, 6, 5},   // +x
                    {3, 0, 4}, {3, 4, 7}};  // -x
  mesh.watertight = check_watertight(mesh);
  return mesh;
}

TriangleMesh make_torus(double major_radius, double minor_radius,
                        int major_segments, int minor_segments) {
  if (minor_radius <= 0 || major_radius <= minor_radius)
    fail(ErrorCode::invalid_argument, "make_torus: need major > minor > 0");
  TriangleMesh mesh;
  for (int i = 0; i < major_segments; ++i) {
    const double u = 2.0 * M_PI * i / major_segments;
    for (int j = 0; j < minor_segments; ++j) {
      const double v = 2.0 * M_PI * j / minor_segments;
      const double w = major_radius + minor_radius * std::cos(v);
      mesh.vertices.emplace_back(w * std::cos(u), w * std::sin(u),
                                 minor_radius * std::sin(v));
    }
  }
  auto idx = [&](int i, int j) {
    return (i % major_segments) * minor_segments + (j % minor_segments);
  };
  for (int i = 0; i < major_segments; ++i) {
    for (int j = 0; j < minor_segments; ++j) {
      mesh.triangles.push_back({idx(i, j), idx(i + 1, j), idx(i, j + 1)});
      mesh.triangles.push_back({idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1)});
    }
  }
  mesh.watertight = check_watertight(mesh);
  return mesh;
}

TriangleMesh make_dumbbell(const DumbbellParams& p) {
  if (p.neck_radius <= 0 || p.lobe_radius <= p.neck_radius)
    fail(ErrorCode::invalid_argument, "make_dumbbell: need lobe > neck > 0");
  const double R = p.arc_radius;
  const double t0 = p.arc_half_angle;
  // Arc in the XZ plane; the chord between the lobe tips is vertical and the
  // neck bulges toward +X, offset by the sagitta R*(1-cos t0).
  const double x_off = R * (1.0 - std::cos(t0)) / 2.0 - R;

  std::vector<Eigen::Vector3d> centers;
  std::vector<Eigen::Vector3d> normals;
  std::vector<double> radii;

  auto path_point = [&](double s) {
    return Eigen::Vector3d(x_off + R * std::cos(s), 0, R * std::sin(s));
  };
  auto tangent = [&](double s) {
    return Eigen::Vector3d(-std::sin(s), 0, std::cos(s));
  };

  const int cap_rings = 4;
  // lower cap (apex first so the tube starts closed)
  {
    const Eigen::Vector3d end = path_point(-t0);
    const Eigen::Vector3d out = -tangent(-t0);
    centers.push_back(end + p.lobe_radius * out);
    normals.emplace_back(std::cos(-t0), 0, std::sin(-t0));
    radii.push_back(0);
    for (int k = cap_rings; k >= 1; --k) {
      const double a = (M_PI / 2) * k / (cap_rings + 1);
      centers.push_back(end + std::sin(a) * p.lobe_radius * out);
      normals.emplace_back(std::cos(-t0), 0, std::sin(-t0));
      radii.push_back(std::cos(a) * p.lobe_radius);
    }
  }
  for (int i = 0; i <= p.path_segments; ++i) {
    const double s = -t0 + 2.0 * t0 * i / p.path_segments;
    const double u = std::abs(s) / t0;
    centers.push_back(path_point(s));
    normals.emplace_back(std::cos(s), 0, std::sin(s));
    radii.push_back(p.neck_radius +
                    (p.lobe_radius - p.neck_radius) * u * u * u * u);
  }
  {
    const Eigen::Vector3d end = path_point(t0);
    const Eigen::Vector3d out = tangent(t0);
    for (int k = 1; k <= cap_rings; ++k) {
      const double a = (M_PI / 2) * k / (cap_rings + 1);
      centers.push_back(end + std::sin(a) * p.lobe_radius * out);
      normals.emplace_back(std::cos(t0), 0, std::sin(t0));
      radii.push_back(std::cos(a) * p.lobe_radius);
    }
    centers.push_back(end + p.lobe_radius * out);
    normals.emplace_back(std::cos(t0), 0, std::sin(t0));
    radii.push_back(0);
  }
  return sweep_tube(centers, normals, {0, 1, 0}, radii, p.ring_segments);
}

void dumbbell_tips(const DumbbellParams& p, Eigen::Vector3d& tip_a,
                   Eigen::Vector3d& tip_b) {
  const double R = p.arc_radius;
  const double t0 = p.arc_half_angle;
  const double x_off = R * (1.0 - std::cos(t0)) / 2.0 - R;
  const Eigen::Vector3d lo(x_off + R * std::cos(t0), 0, -R * std::sin(t0));
  const Eigen::Vector3d hi(x_off + R * std::cos(t0), 0, R * std::sin(t0));
  tip_a = lo + p.lobe_radius * Eigen::Vector3d(std::sin(-t0), 0, -std::cos(-t0));
  tip_b = hi + p.lobe_radius * Eigen::Vector3d(-std::sin(t0), 0, std::cos(t0));
}

TriangleMesh make_shape(const std::string& name) {
  if (name == "sphere") return make_sphere(0.05, 3);
  if (name == "cube") return make_cube(0.08);
  if (name == "torus") return make_torus(0.04, 0.016);
  if (name == "dumbbell") return make_dumbbell();
  fail(ErrorCode::invalid_argument, "make_shape: unknown shape '" + name + "'");
}

}  // namespace graspmap::geom
