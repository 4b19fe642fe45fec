#include "graspmap/mesh_query.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace graspmap::geom {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// splitmix64; used wherever reproducible draws are promised so results do not
// depend on standard-library distribution internals.
uint64_t splitmix64(uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

double uniform01(uint64_t& state) {
  return static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
}

struct TriHit {
  double t;
  bool grazing;
  bool hit;
};

// Moller-Trumbore, non-culling. Grazing marks hits that are numerically on a
// triangle edge/vertex or rays nearly parallel and close to the plane; parity
// counting re-casts in that case.
TriHit ray_triangle(const Eigen::Vector3d& o, const Eigen::Vector3d& d,
                    const Eigen::Vector3d& v0, const Eigen::Vector3d& v1,
                    const Eigen::Vector3d& v2) {
  constexpr double kBary = 1e-10;
  const Eigen::Vector3d e1 = v1 - v0;
  const Eigen::Vector3d e2 = v2 - v0;
  const Eigen::Vector3d pv = d.cross(e2);
  const double det = e1.dot(pv);
  const double det_scale = d.norm() * e1.norm() * e2.norm();
  if (std::abs(det) <= 1e-14 * det_scale) {
    // Near-parallel; only a problem when the ray skims the triangle's plane.
    const Eigen::Vector3d n = e1.cross(e2);
    const double nn = n.norm();
    if (nn > 0) {
      const double h = std::abs(n.dot(o - v0)) / nn;
      const double extent = std::max(e1.norm(), e2.norm());
      if (h < 1e-9 * std::max(extent, 1.0)) return {0, true, false};
    }
    return {0, false, false};
  }
  const double inv = 1.0 / det;
  const Eigen::Vector3d s = o - v0;
  const double u = s.dot(pv) * inv;
  if (u < -kBary || u > 1 + kBary) return {0, false, false};
  const Eigen::Vector3d qv = s.cross(e1);
  const double v = d.dot(qv) * inv;
  if (v < -kBary || u + v > 1 + kBary) return {0, false, false};
  const double t = e2.dot(qv) * inv;
  const bool grazing = u < kBary || v < kBary || u + v > 1 - kBary;
  return {t, grazing, true};
}

// Squared distance from p to triangle (Ericson, Real-Time Collision
// Detection, 5.1.5).
double point_triangle_sq(const Eigen::Vector3d& p, const Eigen::Vector3d& a,
                         const Eigen::Vector3d& b, const Eigen::Vector3d& c) {
  const Eigen::Vector3d ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0 && d2 <= 0) return ap.squaredNorm();

  const Eigen::Vector3d bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0 && d4 <= d3) return bp.squaredNorm();

  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0 && d1 >= 0 && d3 <= 0) {
    const double v = d1 / (d1 - d3);
    return (ap - v * ab).squaredNorm();
  }

  const Eigen::Vector3d cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0 && d5 <= d6) return cp.squaredNorm();

  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0 && d2 >= 0 && d6 <= 0) {
    const double w = d2 / (d2 - d6);
    return (ap - w * ac).squaredNorm();
  }

  const double va = d3 * d6 - d5 * d4;
  if (va <= 0 && d4 - d3 >= 0 && d5 - d6 >= 0) {
    const double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    return (bp - w * (c - b)).squaredNorm();
  }

  const double denom = 1.0 / (va + vb + vc);
  const double v = vb * denom, w = vc * denom;
  return (p - (a + v * ab + w * ac)).squaredNorm();
}

double box_dist_sq(const Eigen::Vector3d& lo, const Eigen::Vector3d& hi,
                   const Eigen::Vector3d& p) {
  double s = 0;
  for (int k = 0; k < 3; ++k) {
    const double d = std::max({lo[k] - p[k], 0.0, p[k] - hi[k]});
    s += d * d;
  }
  return s;
}

// Slab test for an unbounded ray with t in (t_min, t_max).
bool box_ray_hits(const Eigen::Vector3d& lo, const Eigen::Vector3d& hi,
                  const Eigen::Vector3d& o, const Eigen::Vector3d& inv_d,
                  double t_min, double t_max) {
  double t0 = t_min, t1 = t_max;
  for (int k = 0; k < 3; ++k) {
    double a = (lo[k] - o[k]) * inv_d[k];
    double b = (hi[k] - o[k]) * inv_d[k];
    if (a > b) std::swap(a, b);
    if (std::isnan(a) || std::isnan(b)) continue;  // axis-parallel inside slab
    t0 = std::max(t0, a);
    t1 = std::min(t1, b);
    if (t0 > t1) return false;
  }
  return true;
}

}  // namespace

double winding_number(const TriangleMesh& mesh, const Eigen::Vector3d& p) {
  // van Oosterom & Strackee solid-angle formula summed over triangles.
  double total = 0;
  for (const auto& t : mesh.triangles) {
    const Eigen::Vector3d a = mesh.vertices[t[0]] - p;
    const Eigen::Vector3d b = mesh.vertices[t[1]] - p;
    const Eigen::Vector3d c = mesh.vertices[t[2]] - p;
    const double la = a.norm(), lb = b.norm(), lc = c.norm();
    const double num = a.dot(b.cross(c));
    const double den =
        la * lb * lc + a.dot(b) * lc + b.dot(c) * la + c.dot(a) * lb;
    total += 2.0 * std::atan2(num, den);
  }
  return total / (4.0 * M_PI);
}

MeshQuery::MeshQuery(const TriangleMesh& mesh, InsideMethod method)
    : mesh_(mesh), method_(method) {
  scale_ = std::max(mesh_.bounding_diagonal(), 1e-12);
  const int n = static_cast<int>(mesh_.triangles.size());
  if (n > 0) {
    std::vector<Eigen::Vector3d> centroids(n);
    for (int i = 0; i < n; ++i)
      centroids[i] = (mesh_.vertex(i, 0) + mesh_.vertex(i, 1) +
                      mesh_.vertex(i, 2)) / 3.0;
    tri_order_.resize(n);
    std::iota(tri_order_.begin(), tri_order_.end(), 0);
    nodes_.reserve(2 * n);
    build(tri_order_, 0, n, centroids);
  }
  // Fixed direction table for parity casts; the first entry is the default,
  // the rest are fallbacks when a cast grazes an edge or vertex.
  uint64_t state = 0x5DEECE66Dull;
  for (int i = 0; i < 32; ++i) {
    Eigen::Vector3d d;
    do {
      d = {2 * uniform01(state) - 1, 2 * uniform01(state) - 1,
           2 * uniform01(state) - 1};
    } while (d.squaredNorm() < 0.1 || d.squaredNorm() > 1.0);
    dirs_.push_back(d.normalized());
  }
}

int MeshQuery::build(std::vector<int>& order, int first, int count,
                     const std::vector<Eigen::Vector3d>& centroids) {
  Node node;
  node.lo.setConstant(kInf);
  node.hi.setConstant(-kInf);
  for (int i = first; i < first + count; ++i) {
    for (int c = 0; c < 3; ++c) {
      const Eigen::Vector3d v = mesh_.vertex(order[i], c);
      node.lo = node.lo.cwiseMin(v);
      node.hi = node.hi.cwiseMax(v);
    }
  }
  const int index = static_cast<int>(nodes_.size());
  nodes_.push_back(node);
  if (count <= 4) {
    nodes_[index].first = first;
    nodes_[index].count = count;
    return index;
  }
  Eigen::Vector3d clo = Eigen::Vector3d::Constant(kInf);
  Eigen::Vector3d chi = Eigen::Vector3d::Constant(-kInf);
  for (int i = first; i < first + count; ++i) {
    clo = clo.cwiseMin(centroids[order[i]]);
    chi = chi.cwiseMax(centroids[order[i]]);
  }
  int axis;
  (chi - clo).maxCoeff(&axis);
  const int mid = first + count / 2;
  std::nth_element(order.begin() + first, order.begin() + mid,
                   order.begin() + first + count, [&](int a, int b) {
                     return centroids[a][axis] < centroids[b][axis];
                   });
  const int left = build(order, first, mid - first, centroids);
  const int right = build(order, mid, first + count - mid, centroids);
  nodes_[index].left = left;
  nodes_[index].right = right;
  return index;
}

bool MeshQuery::parity_cast(const Eigen::Vector3d& origin,
                            const Eigen::Vector3d& dir, bool& odd) const {
  const Eigen::Vector3d inv_d = dir.cwiseInverse();
  const double t_eps = 1e-12 * scale_;
  int stack[64];
  int top = 0;
  stack[top++] = 0;
  int count = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    if (!box_ray_hits(node.lo, node.hi, origin, inv_d, 0.0, kInf)) continue;
    if (node.count > 0) {
      for (int i = node.first; i < node.first + node.count; ++i) {
        const int tri = tri_order_[i];
        const TriHit h = ray_triangle(origin, dir, mesh_.vertex(tri, 0),
                                      mesh_.vertex(tri, 1), mesh_.vertex(tri, 2));
        if (h.grazing && (!h.hit || h.t > -t_eps)) return false;
        if (h.hit) {
          if (std::abs(h.t) <= t_eps) return false;  // origin on surface
          if (h.t > 0) ++count;
        }
      }
    } else {
      stack[top++] = node.left;
      stack[top++] = node.right;
    }
  }
  odd = (count % 2) == 1;
  return true;
}

bool MeshQuery::contains_point(const Eigen::Vector3d& p) const {
  if (mesh_.empty() || !mesh_.watertight)
    fail(ErrorCode::topology, "contains_point: mesh is not watertight");
  if (method_ == InsideMethod::winding_number)
    return std::abs(winding_number(mesh_, p)) > 0.5;
  for (const auto& dir : dirs_) {
    bool odd = false;
    if (parity_cast(p, dir, odd)) return odd;
  }
  // Every direction grazed (typically the point sits on the surface).
  return std::abs(winding_number(mesh_, p)) > 0.5;
}

double MeshQuery::closest_sq(const Eigen::Vector3d& p, int* tri_out) const {
  struct Entry {
    double d;
    int node;
  };
  Entry stack[64];
  int top = 0;
  stack[top++] = {box_dist_sq(nodes_[0].lo, nodes_[0].hi, p), 0};
  double best = kInf;
  int best_tri = -1;
  while (top > 0) {
    const Entry e = stack[--top];
    if (e.d >= best) continue;
    const Node& node = nodes_[e.node];
    if (node.count > 0) {
      for (int i = node.first; i < node.first + node.count; ++i) {
        const int tri = tri_order_[i];
        const double d = point_triangle_sq(p, mesh_.vertex(tri, 0),
                                           mesh_.vertex(tri, 1),
                                           mesh_.vertex(tri, 2));
        if (d < best) {
          best = d;
          best_tri = tri;
        }
      }
    } else {
      Entry l{box_dist_sq(nodes_[node.left].lo, nodes_[node.left].hi, p),
              node.left};
      Entry r{box_dist_sq(nodes_[node.right].lo, nodes_[node.right].hi, p),
              node.right};
      if (l.d > r.d) std::swap(l, r);  // visit the nearer child first
      if (r.d < best) stack[top++] = r;
      if (l.d < best) stack[top++] = l;
    }
  }
  if (tri_out) *tri_out = best_tri;
  return best;
}

double MeshQuery::distance(const Eigen::Vector3d& p) const {
  if (mesh_.empty()) fail(ErrorCode::empty_input, "distance: empty mesh");
  return std::sqrt(closest_sq(p, nullptr));
}

int MeshQuery::closest_triangle(const Eigen::Vector3d& p) const {
  if (mesh_.empty())
    fail(ErrorCode::empty_input, "closest_triangle: empty mesh");
  int tri = -1;
  closest_sq(p, &tri);
  return tri;
}

bool MeshQuery::within_distance(const Eigen::Vector3d& p, double tol) const {
  if (mesh_.empty()) return false;
  const double tol_sq = tol * tol;
  int stack[64];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    if (box_dist_sq(node.lo, node.hi, p) > tol_sq) continue;
    if (node.count > 0) {
      for (int i = node.first; i < node.first + node.count; ++i) {
        const int tri = tri_order_[i];
        if (point_triangle_sq(p, mesh_.vertex(tri, 0), mesh_.vertex(tri, 1),
                              mesh_.vertex(tri, 2)) <= tol_sq)
          return true;
      }
    } else {
      stack[top++] = node.left;
      stack[top++] = node.right;
    }
  }
  return false;
}

double MeshQuery::signed_distance(const Eigen::Vector3d& p) const {
  const double d = distance(p);
  if (!mesh_.watertight)
    fail(ErrorCode::topology, "signed_distance: mesh is not watertight");
  return contains_point(p) ? -d : d;
}

bool MeshQuery::segment_inside(const Eigen::Vector3d& q1,
                               const Eigen::Vector3d& q2, int samples,
                               double surface_tol) const {
  if (samples < 2)
    fail(ErrorCode::invalid_argument, "segment_inside: samples must be >= 2");
  if (mesh_.empty() || !mesh_.watertight)
    fail(ErrorCode::topology, "segment_inside: mesh is not watertight");
  for (int i = 1; i <= samples; ++i) {
    const double lambda = static_cast<double>(i) / (samples + 1);
    const Eigen::Vector3d p = (1.0 - lambda) * q1 + lambda * q2;
    if (contains_point(p)) continue;
    if (within_distance(p, surface_tol)) continue;
    return false;
  }
  return true;
}

double MeshQuery::ray_nearest(const Eigen::Vector3d& origin,
                              const Eigen::Vector3d& dir, double t_min) const {
  if (nodes_.empty()) return kInf;
  const Eigen::Vector3d inv_d = dir.cwiseInverse();
  double best = kInf;
  int stack[64];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    if (!box_ray_hits(node.lo, node.hi, origin, inv_d, t_min, best)) continue;
    if (node.count > 0) {
      for (int i = node.first; i < node.first + node.count; ++i) {
        const int tri = tri_order_[i];
        const TriHit h = ray_triangle(origin, dir, mesh_.vertex(tri, 0),
                                      mesh_.vertex(tri, 1), mesh_.vertex(tri, 2));
        if (h.hit && h.t > t_min && h.t < best) best = h.t;
      }
    } else {
      stack[top++] = node.left;
      stack[top++] = node.right;
    }
  }
  return best;
}

std::vector<Eigen::Vector3d> surface_sample(const TriangleMesh& mesh,
                                            int count, uint64_t seed) {
  if (mesh.empty()) fail(ErrorCode::empty_input, "surface_sample: empty mesh");
  if (count <= 0)
    fail(ErrorCode::invalid_argument, "surface_sample: count must be positive");
  std::vector<double> cumulative(mesh.triangles.size());
  double total = 0;
  for (size_t i = 0; i < mesh.triangles.size(); ++i) {
    total += 0.5 * mesh.triangle_normal(static_cast<int>(i)).norm();
    cumulative[i] = total;
  }
  if (total <= 0)
    fail(ErrorCode::degenerate_geometry, "surface_sample: zero surface area");

  uint64_t state = seed ^ 0x9E3779B97F4A7C15ull;
  std::vector<Eigen::Vector3d> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    const double pick = uniform01(state) * total;
    const size_t tri = std::lower_bound(cumulative.begin(), cumulative.end(),
                                        pick) - cumulative.begin();
    const size_t t = std::min(tri, mesh.triangles.size() - 1);
    // sqrt trick for uniform barycentric coordinates
    const double r1 = std::sqrt(uniform01(state));
    const double r2 = uniform01(state);
    const Eigen::Vector3d a = mesh.vertices[mesh.triangles[t][0]];
    const Eigen::Vector3d b = mesh.vertices[mesh.triangles[t][1]];
    const Eigen::Vector3d c = mesh.vertices[mesh.triangles[t][2]];
    out.push_back((1 - r1) * a + r1 * (1 - r2) * b + r1 * r2 * c);
  }
  return out;
}

}  // namespace graspmap::geom
