#include "graspmetric/spatial_index.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "graspmetric/errors.hpp"

namespace graspmetric {

namespace {
constexpr std::uint32_t kLeafSize = 8;

struct Candidate {
  double dist_sq;
  std::uint32_t index;
  // Max-heap on (distance, index): the top is the current worst neighbor.
  bool operator<(const Candidate& other) const {
    return dist_sq < other.dist_sq || (dist_sq == other.dist_sq && index < other.index);
  }
};
}  // namespace

SpatialIndex::SpatialIndex(std::vector<Vec3> points, std::vector<Vec3> normals)
    : points_(std::move(points)), normals_(std::move(normals)) {
  if (normals_.size() != points_.size()) normals_.assign(points_.size(), Vec3::Zero());
  order_.resize(points_.size());
  for (std::uint32_t i = 0; i < order_.size(); ++i) order_[i] = i;
  if (!points_.empty()) build(0, static_cast<std::uint32_t>(points_.size()));
}

SpatialIndex::SpatialIndex(const SurfaceSamples& samples)
    : SpatialIndex(samples.points, samples.normals) {}

std::int32_t SpatialIndex::build(std::uint32_t begin, std::uint32_t end) {
  const auto index = static_cast<std::int32_t>(nodes_.size());
  nodes_.emplace_back();
  Eigen::AlignedBox3d box;
  for (std::uint32_t i = begin; i < end; ++i) box.extend(points_[order_[i]]);
  nodes_[index].box = box;
  nodes_[index].begin = begin;
  nodes_[index].end = end;
  if (end - begin <= kLeafSize) return index;

  Eigen::Index axis = 0;
  box.sizes().maxCoeff(&axis);
  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::uint32_t l, std::uint32_t r) {
                     const double pl = points_[l][axis];
                     const double pr = points_[r][axis];
                     return pl < pr || (pl == pr && l < r);
                   });
  const std::int32_t left = build(begin, mid);
  const std::int32_t right = build(mid, end);
  nodes_[index].left = left;
  nodes_[index].right = right;
  return index;
}

std::vector<Neighbor> SpatialIndex::knn(const Vec3& query, std::size_t k) const {
  if (k == 0) throw KTooLarge(k, points_.size());
  if (k > points_.size()) throw KTooLarge(k, points_.size());

  std::priority_queue<Candidate> heap;
  std::vector<std::int32_t> stack{0};
  while (!stack.empty()) {
    const Node& node = nodes_[stack.back()];
    stack.pop_back();
    // A box exactly at the worst distance may still hold a lower-index tie.
    if (heap.size() == k && node.box.squaredExteriorDistance(query) > heap.top().dist_sq) {
      continue;
    }
    if (node.left < 0) {
      for (std::uint32_t i = node.begin; i < node.end; ++i) {
        const Candidate c{distance_sq(points_[order_[i]], query), order_[i]};
        if (heap.size() < k) {
          heap.push(c);
        } else if (c < heap.top()) {
          heap.pop();
          heap.push(c);
        }
      }
      continue;
    }
    const double dl = nodes_[node.left].box.squaredExteriorDistance(query);
    const double dr = nodes_[node.right].box.squaredExteriorDistance(query);
    if (dl <= dr) {
      stack.push_back(node.right);
      stack.push_back(node.left);
    } else {
      stack.push_back(node.left);
      stack.push_back(node.right);
    }
  }

  std::vector<Neighbor> result(heap.size());
  for (std::size_t i = result.size(); i-- > 0;) {
    const Candidate c = heap.top();
    heap.pop();
    result[i] = {c.index, points_[c.index], normals_[c.index], std::sqrt(c.dist_sq)};
  }
  return result;
}

bool SpatialIndex::any_in_box(const Eigen::AlignedBox3d& box,
                              const std::function<bool(std::size_t)>& visit) const {
  if (nodes_.empty()) return false;
  std::vector<std::int32_t> stack{0};
  while (!stack.empty()) {
    const Node& node = nodes_[stack.back()];
    stack.pop_back();
    if (!node.box.intersects(box)) continue;
    if (node.left < 0) {
      for (std::uint32_t i = node.begin; i < node.end; ++i) {
        if (box.contains(points_[order_[i]]) && visit(order_[i])) return true;
      }
      continue;
    }
    stack.push_back(node.right);
    stack.push_back(node.left);
  }
  return false;
}

}  // namespace graspmetric
