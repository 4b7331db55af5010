#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Geometry>

#include "graspmetric/mesh.hpp"

namespace graspmetric {

struct Neighbor {
  std::size_t index = 0;
  Vec3 point = Vec3::Zero();
  Vec3 normal = Vec3::Zero();
  double distance = 0.0;
};

// Exact k-d tree over a point set with normals. k-NN results equal a linear
// scan, with equal distances ordered by ascending point index.
class SpatialIndex {
 public:
  SpatialIndex(std::vector<Vec3> points, std::vector<Vec3> normals);
  explicit SpatialIndex(const SurfaceSamples& samples);

  std::size_t size() const { return points_.size(); }
  const std::vector<Vec3>& points() const { return points_; }
  const std::vector<Vec3>& normals() const { return normals_; }

  // Throws KTooLarge when k exceeds the point count; k must be >= 1.
  std::vector<Neighbor> knn(const Vec3& query, std::size_t k) const;

  // Visits indices of points inside `box` until `visit` returns true.
  // Returns true if a visit stopped the search.
  bool any_in_box(const Eigen::AlignedBox3d& box,
                  const std::function<bool(std::size_t)>& visit) const;

 private:
  struct Node {
    Eigen::AlignedBox3d box;
    std::uint32_t begin = 0;
    std::uint32_t end = 0;
    std::int32_t left = -1;
    std::int32_t right = -1;
  };

  std::int32_t build(std::uint32_t begin, std::uint32_t end);

  std::vector<Vec3> points_;
  std::vector<Vec3> normals_;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
};

// Squared Euclidean distance; the single definition shared by the index and
// by anything that must reproduce its ordering.
inline double distance_sq(const Vec3& a, const Vec3& b) { return (a - b).squaredNorm(); }

}  // namespace graspmetric
