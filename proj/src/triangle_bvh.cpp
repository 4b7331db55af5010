#include "graspmetric/triangle_bvh.hpp"

#include <algorithm>
#include <limits>

namespace graspmetric {

// Region-based closest point (Ericson, Real-Time Collision Detection 5.1.5).
TrianglePoint closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b,
                                        const Vec3& c) {
  const Vec3 ab = b - a;
  const Vec3 ac = c - a;
  const Vec3 ap = p - a;
  const double d1 = ab.dot(ap);
  const double d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return {a, Vec3(1, 0, 0)};

  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp);
  const double d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return {b, Vec3(0, 1, 0)};

  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
    const double v = d1 / (d1 - d3);
    return {a + v * ab, Vec3(1 - v, v, 0)};
  }

  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp);
  const double d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return {c, Vec3(0, 0, 1)};

  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
    const double w = d2 / (d2 - d6);
    return {a + w * ac, Vec3(1 - w, 0, w)};
  }

  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    const double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    return {b + w * (c - b), Vec3(0, 1 - w, w)};
  }

  const double denom = 1.0 / (va + vb + vc);
  const double v = vb * denom;
  const double w = vc * denom;
  return {a + ab * v + ac * w, Vec3(1 - v - w, v, w)};
}

namespace {
constexpr std::uint32_t kLeafSize = 4;

double box_distance_sq(const Eigen::AlignedBox3d& box, const Vec3& p) {
  return box.squaredExteriorDistance(p);
}
}  // namespace

TriangleBvh::TriangleBvh(std::span<const Vec3> vertices, std::span<const Face> faces)
    : vertices_(vertices.begin(), vertices.end()), faces_(faces.begin(), faces.end()) {
  face_boxes_.reserve(faces_.size());
  centroids_.reserve(faces_.size());
  for (const Face& f : faces_) {
    Eigen::AlignedBox3d box(vertices_[f[0]]);
    box.extend(vertices_[f[1]]);
    box.extend(vertices_[f[2]]);
    face_boxes_.push_back(box);
    centroids_.push_back((vertices_[f[0]] + vertices_[f[1]] + vertices_[f[2]]) / 3.0);
  }
  order_.resize(faces_.size());
  for (std::uint32_t i = 0; i < order_.size(); ++i) order_[i] = i;
  nodes_.reserve(2 * faces_.size() / kLeafSize + 2);
  if (!faces_.empty()) build(0, static_cast<std::uint32_t>(faces_.size()));
}

std::uint32_t TriangleBvh::build(std::uint32_t begin, std::uint32_t end) {
  const auto index = static_cast<std::uint32_t>(nodes_.size());
  nodes_.emplace_back();
  Eigen::AlignedBox3d box;
  Eigen::AlignedBox3d centroid_box;
  for (std::uint32_t i = begin; i < end; ++i) {
    box.extend(face_boxes_[order_[i]]);
    centroid_box.extend(centroids_[order_[i]]);
  }
  nodes_[index].box = box;

  if (end - begin <= kLeafSize) {
    nodes_[index].first = begin;
    nodes_[index].count = end - begin;
    return index;
  }

  Eigen::Index axis = 0;
  centroid_box.sizes().maxCoeff(&axis);
  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::uint32_t l, std::uint32_t r) {
                     const double cl = centroids_[l][axis];
                     const double cr = centroids_[r][axis];
                     return cl < cr || (cl == cr && l < r);
                   });
  const std::uint32_t left = build(begin, mid);
  const std::uint32_t right = build(mid, end);
  nodes_[index].first = left;
  nodes_[index].right = right;
  return index;
}

TriangleBvh::Closest TriangleBvh::closest(const Vec3& query) const {
  Closest best;
  best.distance_sq = std::numeric_limits<double>::infinity();
  best.face = std::numeric_limits<std::size_t>::max();
  if (nodes_.empty()) return best;

  std::vector<std::uint32_t> stack{0};
  while (!stack.empty()) {
    const Node& node = nodes_[stack.back()];
    stack.pop_back();
    if (box_distance_sq(node.box, query) > best.distance_sq) continue;
    if (node.count > 0) {
      for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
        const std::uint32_t f = order_[i];
        const Face& face = faces_[f];
        const auto hit =
            closest_point_on_triangle(query, vertices_[face[0]], vertices_[face[1]],
                                      vertices_[face[2]]);
        const double d = (hit.point - query).squaredNorm();
        if (d < best.distance_sq || (d == best.distance_sq && f < best.face)) {
          best = {f, hit.point, d};
        }
      }
      continue;
    }
    const double dl = box_distance_sq(nodes_[node.first].box, query);
    const double dr = box_distance_sq(nodes_[node.right].box, query);
    // Visit the nearer child first.
    if (dl <= dr) {
      stack.push_back(node.right);
      stack.push_back(node.first);
    } else {
      stack.push_back(node.first);
      stack.push_back(node.right);
    }
  }
  return best;
}

void TriangleBvh::for_each_overlapping(const Eigen::AlignedBox3d& box,
                                       const std::function<void(std::size_t)>& visit) const {
  if (nodes_.empty()) return;
  std::vector<std::uint32_t> stack{0};
  while (!stack.empty()) {
    const Node& node = nodes_[stack.back()];
    stack.pop_back();
    if (!node.box.intersects(box)) continue;
    if (node.count > 0) {
      for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
        if (face_boxes_[order_[i]].intersects(box)) visit(order_[i]);
      }
      continue;
    }
    stack.push_back(node.right);
    stack.push_back(node.first);
  }
}

}  // namespace graspmetric
