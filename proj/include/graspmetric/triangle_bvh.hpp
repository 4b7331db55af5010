#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Geometry>

#include "graspmetric/mesh.hpp"

namespace graspmetric {

// Closest point on triangle (a, b, c) to p, with barycentric weights of the
// returned point.
struct TrianglePoint {
  Vec3 point;
  Vec3 barycentric;
};
TrianglePoint closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b,
                                        const Vec3& c);

// Axis-aligned bounding volume hierarchy over the faces of a mesh.
class TriangleBvh {
 public:
  TriangleBvh(std::span<const Vec3> vertices, std::span<const Face> faces);

  struct Closest {
    std::size_t face = 0;
    Vec3 point = Vec3::Zero();
    double distance_sq = 0.0;
  };
  // Ties between faces at equal distance resolve to the lowest face index.
  Closest closest(const Vec3& query) const;

  // Calls `visit(face)` for every face whose box overlaps `box`.
  void for_each_overlapping(const Eigen::AlignedBox3d& box,
                            const std::function<void(std::size_t)>& visit) const;

 private:
  struct Node {
    Eigen::AlignedBox3d box;
    std::uint32_t first = 0;  // leaf: first entry in order_; inner: left child
    std::uint32_t count = 0;  // leaf when count > 0
    std::uint32_t right = 0;
  };

  std::uint32_t build(std::uint32_t begin, std::uint32_t end);

  std::vector<Vec3> vertices_;
  std::vector<Face> faces_;
  std::vector<Eigen::AlignedBox3d> face_boxes_;
  std::vector<Vec3> centroids_;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
};

}  // namespace graspmetric
