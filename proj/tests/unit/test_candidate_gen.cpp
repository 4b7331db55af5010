#include <doctest.h>

#include <algorithm>
#include <numbers>
#include <numeric>
#include <random>

#include "graspmetric/candidates.hpp"
#include "graspmetric/pipeline.hpp"
#include "graspmetric/primitives.hpp"
#include "test_support.hpp"

using namespace graspmetric;

namespace {

double angle_between(const Vec3& a, const Vec3& b) {
  return std::atan2(a.cross(b).norm(), a.dot(b));
}

TriangleMesh with_samples(const TriangleMesh& mesh) {
  return prepare_mesh(mesh, testsupport::small_config());
}

}  // namespace

TEST_CASE("single and double view coverings") {
  const auto one = generate_views(1);
  REQUIRE(one.size() == 1);
  CHECK(one[0] == Vec3(0, 0, 1));
  const auto two = generate_views(2);
  REQUIRE(two.size() == 2);
  CHECK(angle_between(two[0], two[1]) >= std::numbers::pi / 2);
}

TEST_CASE("300 views cover the sphere evenly") {
  const auto views = generate_views(300);
  REQUIRE(views.size() == 300);
  // ideal spacing: side of the square cell holding one view
  const double ideal = std::sqrt(4 * std::numbers::pi / 300.0);
  double min_pair = 10.0;
  std::vector<double> nearest(views.size(), 10.0);
  for (std::size_t i = 0; i < views.size(); ++i) {
    CHECK(std::abs(views[i].norm() - 1.0) < 1e-12);
    for (std::size_t j = i + 1; j < views.size(); ++j) {
      const double a = angle_between(views[i], views[j]);
      min_pair = std::min(min_pair, a);
      nearest[i] = std::min(nearest[i], a);
      nearest[j] = std::min(nearest[j], a);
    }
  }
  CHECK(min_pair > 0.5 * ideal);
  const double mean = std::accumulate(nearest.begin(), nearest.end(), 0.0) / nearest.size();
  CHECK(*std::max_element(nearest.begin(), nearest.end()) < 1.5 * mean);
  CHECK(generate_views(300) == views);
}

TEST_CASE("in-plane rotations") {
  const auto r = in_plane_rotations(12);
  REQUIRE(r.size() == 12);
  for (std::size_t k = 0; k < 12; ++k) CHECK(r[k] == std::numbers::pi * k / 12.0);
}

TEST_CASE("farthest point sampling matches a direct greedy scan") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<Vec3> pts(500);
  for (auto& p : pts) p = Vec3(u(rng), u(rng), u(rng));
  const auto got = farthest_point_sampling(pts, 40);
  REQUIRE(got.size() == 40);
  CHECK(got[0] == 0);
  for (std::size_t s = 1; s < got.size(); ++s) {
    // chosen point maximizes distance to the already chosen set
    double want = -1;
    std::size_t arg = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      double d = 1e300;
      for (std::size_t c = 0; c < s; ++c) d = std::min(d, (pts[i] - pts[got[c]]).norm());
      if (d > want) {
        want = d;
        arg = i;
      }
    }
    CHECK(got[s] == arg);
  }
  CHECK(farthest_point_sampling(pts, 10000).size() == pts.size());
}

TEST_CASE("pose construction follows the view") {
  std::mt19937_64 rng(2);
  for (const Vec3& view : generate_views(50)) {
    for (double angle : in_plane_rotations(12)) {
      const GraspPose p = make_pose(Vec3(1, 2, 3), view, angle, 0.02, 0.05);
      CHECK(is_rotation(p.rotation, 1e-12));
      CHECK((p.approach() + view).norm() < 1e-12);
      CHECK((p.translation - (Vec3(1, 2, 3) - 0.02 * view)).norm() < 1e-12);
    }
  }
  // consecutive in-plane angles rotate the closing axis by pi/A
  const Vec3 view = generate_views(7)[3];
  const auto a = make_pose(Vec3::Zero(), view, 0.0, 0.01, 0.05);
  const auto b = make_pose(Vec3::Zero(), view, std::numbers::pi / 12, 0.01, 0.05);
  CHECK(std::abs(angle_between(a.closing(), b.closing()) - std::numbers::pi / 12) < 1e-12);
}

TEST_CASE("sphere candidates close across the seed") {
  const auto sphere = with_samples(primitives::icosphere(0.03, 3));
  const GripperModel m;
  CandidateGrid grid;
  grid.seed_points = {sphere.surface_points().points[5]};
  const Vec3 radial = grid.seed_points[0].normalized();
  grid.views = {radial};  // approach points inward
  grid.rotations = in_plane_rotations(12);
  grid.depths = m.depth_levels;
  const auto cands = enumerate_candidates(sphere, grid, m);
  REQUIRE(!cands.empty());
  for (const auto& c : cands) {
    CHECK(c.frame.valid);
    // the jaw line stays perpendicular to the approach and along the closing axis
    CHECK(std::abs(c.frame.v_a.dot(radial)) < std::sin(0.1));
    CHECK(angle_between(c.frame.v_a, c.pose.closing()) < 0.1);
  }
}

TEST_CASE("single seed and view on a cube face yields at most 48") {
  const auto cube = with_samples(primitives::box(0.04, 0.04, 0.04));
  const GripperModel m;
  CandidateGrid grid;
  grid.seed_points = {Vec3(0.005, -0.003, 0.02)};  // on the top face
  grid.views = {Vec3(0, 0, 1)};                    // antiparallel to approach -z
  grid.rotations = in_plane_rotations(12);
  grid.depths = m.depth_levels;
  CHECK(grid.cardinality() == 48);
  EnumerationStats stats;
  const auto cands = enumerate_candidates(cube, grid, m, {}, &stats);
  CHECK(cands.size() <= 48);
  CHECK(!cands.empty());
  CHECK(stats.considered == 48);
  CHECK(stats.invalid + stats.collided + stats.yielded == 48);
  CHECK(stats.yielded == cands.size());
}

TEST_CASE("plate wider than the gripper is never grasped across its length") {
  // 15 cm long: only the 5 cm and 1 cm axes fit in an 8.5 cm gripper
  const auto plate = with_samples(primitives::box(0.15, 0.05, 0.01));
  const GripperModel m;
  GridSizes sizes;
  sizes.seeds = 32;
  sizes.views = 60;
  sizes.rotations = 12;
  const auto grid = make_grid(plate, sizes, m);
  const auto cands = enumerate_candidates(plate, grid, m);
  REQUIRE(cands.size() > 100);
  for (const auto& c : cands) {
    const bool across_length = std::abs(c.frame.p_cl.x()) > 0.0749 &&
                               std::abs(c.frame.p_cr.x()) > 0.0749 &&
                               c.frame.p_cl.x() * c.frame.p_cr.x() < 0;
    CHECK_FALSE(across_length);
    CHECK((c.frame.p_cr - c.frame.p_cl).norm() <= m.max_width);
  }
}

TEST_CASE("candidates satisfy pose invariants and are deterministic") {
  const auto prism = with_samples(primitives::l_prism(0.03));
  const GripperModel m;
  GridSizes sizes;
  sizes.seeds = 16;
  sizes.views = 30;
  sizes.rotations = 6;
  const auto grid = make_grid(prism, sizes, m);
  CHECK(grid.cardinality() == 16 * 30 * 6 * 4);
  CandidateOptions serial;
  CandidateOptions parallel;
  parallel.workers = 3;
  EnumerationStats st1, st2;
  const auto a = enumerate_candidates(prism, grid, m, serial, &st1);
  const auto b = enumerate_candidates(prism, grid, m, parallel, &st2);
  REQUIRE(a.size() == b.size());
  CHECK(a.size() <= grid.cardinality());
  CHECK(st1.yielded == st2.yielded);
  CHECK(st1.collided == st2.collided);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].pose.rotation == b[i].pose.rotation);
    CHECK(a[i].pose.translation == b[i].pose.translation);
    CHECK(a[i].frame.p_cl == b[i].frame.p_cl);
    CHECK(a[i].pose.width == b[i].pose.width);
  }
  for (const auto& c : a) {
    CHECK(c.frame.valid);
    CHECK(is_rotation(c.pose.rotation));
    CHECK(c.pose.width > 0);
    CHECK(c.pose.width <= m.max_width);
    CHECK(std::find(m.depth_levels.begin(), m.depth_levels.end(), c.pose.depth) !=
          m.depth_levels.end());
  }
}

TEST_CASE("self-collision rejection only removes candidates") {
  const auto cyl = with_samples(primitives::cylinder(0.02, 0.08, 32));
  const GripperModel m;
  GridSizes sizes;
  sizes.seeds = 8;
  sizes.views = 20;
  sizes.rotations = 6;
  const auto grid = make_grid(cyl, sizes, m);
  CandidateOptions keep;
  keep.reject_self_collision = false;
  const auto all = enumerate_candidates(cyl, grid, m, keep);
  EnumerationStats st;
  const auto filtered = enumerate_candidates(cyl, grid, m, {}, &st);
  CHECK(filtered.size() + st.collided == all.size());
  const SpatialIndex self(cyl.surface_points());
  for (const auto& c : filtered) CHECK_FALSE(gripper_collides(self, c.pose, m));
}

TEST_CASE("parallel_for propagates exceptions") {
  CHECK_THROWS_AS(parallel_for(100, 4,
                               [](std::size_t i) {
                                 if (i == 37) throw std::runtime_error("boom");
                               }),
                  std::runtime_error);
  std::vector<int> hit(1000, 0);
  parallel_for(hit.size(), 4, [&](std::size_t i) { hit[i] += 1; });
  CHECK(std::count(hit.begin(), hit.end(), 1) == 1000);
}
