#include "graspmap/mesh.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace graspmap::geom {

Eigen::Vector3d TriangleMesh::triangle_normal(int tri) const {
  const Eigen::Vector3d a = vertex(tri, 0);
  return (vertex(tri, 1) - a).cross(vertex(tri, 2) - a);
}

void TriangleMesh::bounding_box(Eigen::Vector3d& lo, Eigen::Vector3d& hi) const {
  lo.setConstant(std::numeric_limits<double>::infinity());
  hi.setConstant(-std::numeric_limits<double>::infinity());
  for (const auto& v : vertices) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
}

double TriangleMesh::bounding_diagonal() const {
  if (vertices.empty()) return 0;
  Eigen::Vector3d lo, hi;
  bounding_box(lo, hi);
  return (hi - lo).norm();
}

bool check_watertight(const TriangleMesh& mesh) {
  if (mesh.triangles.empty()) return false;
  std::map<std::pair<int, int>, int> directed;
  for (const auto& t : mesh.triangles) {
    for (int k = 0; k < 3; ++k) {
      const int a = t[k], b = t[(k + 1) % 3];
      if (a == b) return false;
      if (++directed[{a, b}] > 1) return false;  // repeated directed edge
    }
  }
  for (const auto& [edge, n] : directed) {
    (void)n;
    auto rev = directed.find({edge.second, edge.first});
    if (rev == directed.end()) return false;
  }
  return true;
}

namespace {

[[noreturn]] void obj_fail(int line, const std::string& what) {
  fail(ErrorCode::parse, "obj: line " + std::to_string(line) + ": " + what);
}

int parse_face_index(const std::string& token, int line, int vertex_count) {
  // Accept "i", "i/j", "i//k", "i/j/k"; only the leading vertex index is used.
  size_t slash = token.find('/');
  const std::string head = slash == std::string::npos ? token : token.substr(0, slash);
  int idx = 0;
  try {
    size_t pos = 0;
    idx = std::stoi(head, &pos);
    if (pos != head.size()) obj_fail(line, "bad face index '" + token + "'");
  } catch (const std::exception&) {
    obj_fail(line, "bad face index '" + token + "'");
  }
  if (idx < 0) obj_fail(line, "negative indices not supported");
  if (idx == 0 || idx > vertex_count) obj_fail(line, "face index out of range");
  return idx - 1;
}

}  // namespace

TriangleMesh parse_obj(const std::string& text) {
  TriangleMesh mesh;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag.empty() || tag[0] == '#') continue;
    if (tag == "v") {
      double x, y, z;
      if (!(ls >> x >> y >> z)) obj_fail(lineno, "vertex needs 3 coordinates");
      mesh.vertices.emplace_back(x, y, z);
    } else if (tag == "f") {
      std::vector<int> idx;
      std::string token;
      while (ls >> token)
        idx.push_back(parse_face_index(token, lineno,
                                       static_cast<int>(mesh.vertices.size())));
      if (idx.size() != 3) obj_fail(lineno, "faces must be triangles");
      mesh.triangles.push_back({idx[0], idx[1], idx[2]});
    }
    // other records (vn, vt, o, g, s, usemtl, mtllib) are ignored
  }
  mesh.watertight = check_watertight(mesh);
  return mesh;
}

TriangleMesh load_obj(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::io, "obj: cannot open " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  try {
    return parse_obj(buf.str());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::parse)
      fail(ErrorCode::parse, path + ": " + e.what());
    throw;
  }
}

void save_obj(const TriangleMesh& mesh, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::io, "obj: cannot write " + path);
  char buf[128];
  for (const auto& v : mesh.vertices) {
    std::snprintf(buf, sizeof(buf), "v %.17g %.17g %.17g\n", v.x(), v.y(),
                  v.z());
    f << buf;
  }
  for (const auto& t : mesh.triangles)
    f << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
  if (!f) fail(ErrorCode::io, "obj: write failed for " + path);
}

}  // namespace graspmap::geom
