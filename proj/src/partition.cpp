#include "graspmap/partition.hpp"

#include <algorithm>
#include <numeric>

namespace graspmap::hand {

FingerRegionAssignment partition_regions(const refine::ContactMap& map,
                                         const KinematicChain& chain,
                                         const PartitionOptions& opts) {
  const int n = static_cast<int>(map.points.size());
  if (n == 0) fail(ErrorCode::empty_input, "partition_regions: empty map");
  const int nf = static_cast<int>(chain.fingertips.size());
  if (nf < 2)
    fail(ErrorCode::dimension_mismatch,
         "partition_regions: need at least two fingers");

  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  for (const auto& p : map.points) centroid += p;
  centroid /= n;
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto& p : map.points) {
    const Eigen::Vector3d d = p - centroid;
    cov += d * d.transpose();
  }
  cov /= n;
  if (cov.norm() < 1e-18)
    fail(ErrorCode::degenerate_geometry,
         "partition_regions: all points coincide");

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
  if (eig.info() != Eigen::Success)
    fail(ErrorCode::numeric, "partition_regions: eigendecomposition failed");
  Eigen::Vector3d axis = eig.eigenvectors().col(2);  // largest eigenvalue
  // Deterministic sign: the component with the largest magnitude (lowest
  // index on ties) is made positive.
  int major = 0;
  for (int k = 1; k < 3; ++k)
    if (std::abs(axis[k]) > std::abs(axis[major])) major = k;
  if (axis[major] < 0) axis = -axis;

  // Sort by projection; coordinates as tie-break keep the result invariant
  // to input permutation.
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> proj(n);
  for (int i = 0; i < n; ++i) proj[i] = axis.dot(map.points[i] - centroid);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (proj[a] != proj[b]) return proj[a] < proj[b];
    const auto& pa = map.points[a];
    const auto& pb = map.points[b];
    return std::lexicographical_compare(pa.data(), pa.data() + 3, pb.data(),
                                        pb.data() + 3);
  });

  const int lower_count = n / 2;  // median split by count
  int thumb_side = opts.thumb_side;
  if (thumb_side == 0) {
    thumb_side = -1;
    if (opts.wrist_rotation) {
      // The thumb sits on the -Y edge of the palm; pick the half whose
      // centroid lies that way.
      const Eigen::Vector3d palm_y = opts.wrist_rotation->col(1);
      Eigen::Vector3d lower_c = Eigen::Vector3d::Zero();
      Eigen::Vector3d upper_c = Eigen::Vector3d::Zero();
      for (int i = 0; i < lower_count; ++i) lower_c += map.points[order[i]];
      for (int i = lower_count; i < n; ++i) upper_c += map.points[order[i]];
      if (lower_count > 0) lower_c /= lower_count;
      if (n - lower_count > 0) upper_c /= (n - lower_count);
      thumb_side = palm_y.dot(upper_c - lower_c) < 0 ? +1 : -1;
    }
  }

  FingerRegionAssignment out;
  out.principal_axis = axis;
  out.thumb_finger = chain.thumb_index();
  out.regions.resize(nf);

  std::vector<int> thumb_part, rest_part;  // indices in axis order
  if (thumb_side < 0) {
    thumb_part.assign(order.begin(), order.begin() + lower_count);
    rest_part.assign(order.begin() + lower_count, order.end());
  } else {
    rest_part.assign(order.begin(), order.begin() + lower_count);
    thumb_part.assign(order.begin() + lower_count, order.end());
  }
  for (int i : thumb_part) out.regions[out.thumb_finger].push_back(map.points[i]);

  // Contiguous equal-count runs along the axis for the remaining fingers,
  // assigned in chain order.
  std::vector<int> rest_fingers;
  for (int f = 0; f < nf; ++f)
    if (f != out.thumb_finger) rest_fingers.push_back(f);
  const int groups = static_cast<int>(rest_fingers.size());
  const int m = static_cast<int>(rest_part.size());
  for (int g = 0; g < groups; ++g) {
    const int lo = static_cast<int>(static_cast<long>(m) * g / groups);
    const int hi = static_cast<int>(static_cast<long>(m) * (g + 1) / groups);
    for (int i = lo; i < hi; ++i)
      out.regions[rest_fingers[g]].push_back(map.points[rest_part[i]]);
  }
  return out;
}

}  // namespace graspmap::hand
