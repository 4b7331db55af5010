#include "graspmetric/candidates.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <memory>
#include <mutex>
#include <numbers>
#include <thread>

namespace graspmetric {

std::vector<Vec3> generate_views(std::size_t count) {
  if (count == 0) return {};
  if (count == 1) return {Vec3::UnitZ()};
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  std::vector<Vec3> views;
  views.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(count);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * static_cast<double>(i);
    views.emplace_back(r * std::cos(phi), r * std::sin(phi), z);
  }
  return views;
}

std::vector<std::size_t> farthest_point_sampling(std::span<const Vec3> points, std::size_t count) {
  std::vector<std::size_t> chosen;
  if (points.empty() || count == 0) return chosen;
  count = std::min(count, points.size());
  chosen.reserve(count);
  std::vector<double> nearest(points.size(), std::numeric_limits<double>::infinity());
  std::size_t current = 0;
  for (std::size_t s = 0; s < count; ++s) {
    chosen.push_back(current);
    std::size_t next = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      nearest[i] = std::min(nearest[i], (points[i] - points[current]).squaredNorm());
      if (nearest[i] > best) {
        best = nearest[i];
        next = i;
      }
    }
    current = next;
  }
  return chosen;
}

std::vector<double> in_plane_rotations(std::size_t count) {
  std::vector<double> angles(count);
  for (std::size_t k = 0; k < count; ++k) {
    angles[k] = std::numbers::pi * static_cast<double>(k) / static_cast<double>(count);
  }
  return angles;
}

CandidateGrid make_grid(const TriangleMesh& mesh, const GridSizes& sizes,
                        const GripperModel& gripper) {
  CandidateGrid grid;
  const auto& samples = mesh.surface_points();
  for (std::size_t i : farthest_point_sampling(samples.points, sizes.seeds)) {
    grid.seed_points.push_back(samples.points[i]);
  }
  grid.views = generate_views(sizes.views);
  grid.rotations = in_plane_rotations(sizes.rotations);
  grid.depths = gripper.depth_levels;
  return grid;
}

GraspPose make_pose(const Vec3& seed, const Vec3& view, double angle, double depth, double width) {
  const Vec3 approach = -view.normalized();
  const Vec3 helper = std::abs(approach.z()) < 0.9 ? Vec3::UnitZ() : Vec3::UnitX();
  const Vec3 reference = (helper - helper.dot(approach) * approach).normalized();
  const Vec3 closing =
      std::cos(angle) * reference + std::sin(angle) * approach.cross(reference);
  GraspPose pose;
  pose.rotation.col(0) = approach;
  pose.rotation.col(1) = closing;
  pose.rotation.col(2) = approach.cross(closing);
  pose.translation = seed + depth * approach;
  pose.width = width;
  pose.depth = depth;
  return pose;
}

void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& job) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    threads.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          job(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = count;
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<GraspCandidate> enumerate_candidates(const TriangleMesh& mesh,
                                                 const CandidateGrid& grid,
                                                 const GripperModel& gripper,
                                                 const CandidateOptions& options,
                                                 EnumerationStats* stats) {
  std::unique_ptr<SpatialIndex> self_points;
  if (options.reject_self_collision && !mesh.surface_points().empty()) {
    self_points = std::make_unique<SpatialIndex>(mesh.surface_points());
  }

  const std::size_t n_seeds = grid.seed_points.size();
  std::vector<std::vector<GraspCandidate>> per_seed(n_seeds);
  std::vector<EnumerationStats> per_seed_stats(n_seeds);

  parallel_for(n_seeds, options.workers, [&](std::size_t s) {
    auto& out = per_seed[s];
    auto& st = per_seed_stats[s];
    for (std::size_t v = 0; v < grid.views.size(); ++v) {
      for (std::size_t r = 0; r < grid.rotations.size(); ++r) {
        for (std::size_t d = 0; d < grid.depths.size(); ++d) {
          ++st.considered;
          GraspPose pose = make_pose(grid.seed_points[s], grid.views[v], grid.rotations[r],
                                     grid.depths[d], gripper.max_width);
          const ContactFrame probe = resolve_contacts(mesh, pose, gripper);
          if (!probe.valid) {
            ++st.invalid;
            continue;
          }
          // Center the jaws on the contacts and close to separation + clearance.
          const double y_l = pose.closing().dot(probe.p_cl - pose.translation);
          const double y_r = pose.closing().dot(probe.p_cr - pose.translation);
          pose.translation += 0.5 * (y_l + y_r) * pose.closing();
          pose.width = std::min(y_r - y_l + options.width_clearance, gripper.max_width);
          const ContactFrame frame = resolve_contacts(mesh, pose, gripper);
          if (!frame.valid) {
            ++st.invalid;
            continue;
          }
          if (self_points && gripper_collides(*self_points, pose, gripper)) {
            ++st.collided;
            continue;
          }
          ++st.yielded;
          out.push_back({pose, frame, s, v, r, d});
        }
      }
    }
  });

  std::vector<GraspCandidate> all;
  EnumerationStats total;
  for (std::size_t s = 0; s < n_seeds; ++s) {
    all.insert(all.end(), per_seed[s].begin(), per_seed[s].end());
    total.considered += per_seed_stats[s].considered;
    total.invalid += per_seed_stats[s].invalid;
    total.collided += per_seed_stats[s].collided;
    total.yielded += per_seed_stats[s].yielded;
  }
  if (stats) *stats = total;
  return all;
}

}  // namespace graspmetric
