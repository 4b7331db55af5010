#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "graspmetric/gripper.hpp"
#include "graspmetric/mesh.hpp"
#include "graspmetric/spatial_index.hpp"

namespace graspmetric {

// `count` unit vectors on a Fibonacci spiral; a single view is +z.
std::vector<Vec3> generate_views(std::size_t count);

// Greedy farthest-point sampling starting from point 0. Returns indices into
// `points`; distance ties go to the lower index.
std::vector<std::size_t> farthest_point_sampling(std::span<const Vec3> points, std::size_t count);

struct CandidateGrid {
  std::vector<Vec3> seed_points;
  std::vector<Vec3> views;
  std::vector<double> rotations;  // in-plane angles, radians
  std::vector<double> depths;     // meters

  std::size_t cardinality() const {
    return seed_points.size() * views.size() * rotations.size() * depths.size();
  }
};

// rotations = {k*pi/A : k = 0..A-1}
std::vector<double> in_plane_rotations(std::size_t count);

struct GridSizes {
  std::size_t seeds = 256;
  std::size_t views = 300;
  std::size_t rotations = 12;
};

// Seeds are farthest-point samples of the mesh's densified surface points.
CandidateGrid make_grid(const TriangleMesh& mesh, const GridSizes& sizes,
                        const GripperModel& gripper);

// Approach = -view, closing axis rotated by `angle` about the approach from a
// fixed reference perpendicular, translation = seed + depth * approach.
GraspPose make_pose(const Vec3& seed, const Vec3& view, double angle, double depth, double width);

struct CandidateOptions {
  double width_clearance = 0.01;
  // Drop candidates whose fingers or palm intersect the object's own surface
  // samples.
  bool reject_self_collision = true;
  unsigned workers = 1;
};

struct GraspCandidate {
  GraspPose pose;
  ContactFrame frame;
  std::size_t seed = 0;
  std::size_t view = 0;
  std::size_t rotation = 0;
  std::size_t depth = 0;
};

struct EnumerationStats {
  std::size_t considered = 0;
  std::size_t invalid = 0;
  std::size_t collided = 0;
  std::size_t yielded = 0;
};

// Candidates ordered by (seed, view, rotation, depth) regardless of the
// worker count.
std::vector<GraspCandidate> enumerate_candidates(const TriangleMesh& mesh,
                                                 const CandidateGrid& grid,
                                                 const GripperModel& gripper,
                                                 const CandidateOptions& options = {},
                                                 EnumerationStats* stats = nullptr);

// Runs `job(i)` for i in [0, count) over `workers` threads.
void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& job);

}  // namespace graspmetric
