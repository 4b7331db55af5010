#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <vector>

#include "graspmetric/gripper.hpp"
#include "graspmetric/mesh.hpp"

// Slow, independent reference computations shared by unit and acceptance tests.
namespace oracle {

using namespace graspmetric;

// Centroid of the voxel centers inside a closed mesh; inside-ness from the
// parity of z-column crossings. Columns are nudged off the voxel centers so
// they never run exactly along a shared triangle edge.
inline Vec3 voxel_centroid(const TriangleMesh& mesh, int res) {
  const auto box = mesh.bounds();
  const Vec3 lo = box.min();
  const Vec3 step = (box.max() - box.min()) / res;
  Vec3 sum = Vec3::Zero();
  std::size_t count = 0;
  std::vector<double> hits;
  for (int i = 0; i < res; ++i) {
    for (int j = 0; j < res; ++j) {
      const double x = lo.x() + (i + 0.5) * step.x();
      const double y = lo.y() + (j + 0.5) * step.y();
      const double rx = x + 1.37e-9;
      const double ry = y + 2.71e-9;
      hits.clear();
      for (const Face& f : mesh.faces()) {
        const Vec3& a = mesh.vertices()[f[0]];
        const Vec3& b = mesh.vertices()[f[1]];
        const Vec3& c = mesh.vertices()[f[2]];
        const double det = (b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y());
        if (std::abs(det) < 1e-15) continue;
        const double u = ((rx - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (ry - a.y())) / det;
        const double v = ((b.x() - a.x()) * (ry - a.y()) - (rx - a.x()) * (b.y() - a.y())) / det;
        if (u < 0 || v < 0 || u + v > 1) continue;
        hits.push_back(a.z() + u * (b.z() - a.z()) + v * (c.z() - a.z()));
      }
      std::sort(hits.begin(), hits.end());
      for (int k = 0; k < res; ++k) {
        const double z = lo.z() + (k + 0.5) * step.z();
        const auto below = std::lower_bound(hits.begin(), hits.end(), z) - hits.begin();
        if (below % 2 == 1) {
          sum += Vec3(x, y, z);
          ++count;
        }
      }
    }
  }
  return sum / static_cast<double>(count);
}

// k nearest indices by a full sort; equal distances break by index.
inline std::vector<std::size_t> brute_knn(const std::vector<Vec3>& pts, const Vec3& q,
                                          std::size_t k) {
  std::vector<std::size_t> idx(pts.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    const double da = distance_sq(pts[a], q);
    const double db = distance_sq(pts[b], q);
    return da < db || (da == db && a < b);
  });
  idx.resize(k);
  return idx;
}

// Point-to-line distance by scanning t on successively finer grids.
inline double grid_line_distance(const Vec3& a, const Vec3& b, const Vec3& gc) {
  double lo = -20.0;
  double hi = 20.0;
  double best = 0.0;
  for (int level = 0; level < 12; ++level) {
    const int n = 4000;
    double best_d = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= n; ++i) {
      const double t = lo + (hi - lo) * i / n;
      const double d = (gc - (a + t * (b - a))).norm();
      if (d < best_d) {
        best_d = d;
        best = t;
      }
    }
    const double step = (hi - lo) / n;
    lo = best - 2 * step;
    hi = best + 2 * step;
  }
  return (gc - (a + best * (b - a))).norm();
}

// Inward-facing normals of the tangent planes along K sampled boundary rays
// of the cone with axis `axis` and half-angle atan(mu). A direction is in the
// cone iff it is on the inner side of every such plane.
inline bool in_sampled_cone(const Vec3& dir, const Vec3& axis, double mu, int samples) {
  const double alpha = std::atan(mu);
  const Vec3 n = axis.normalized();
  const Vec3 helper = std::abs(n.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  const Vec3 u = n.cross(helper).normalized();
  const Vec3 v = n.cross(u);
  for (int k = 0; k < samples; ++k) {
    const double phi = 2 * std::numbers::pi * k / samples;
    const Vec3 radial = std::cos(phi) * u + std::sin(phi) * v;
    const Vec3 inward = std::sin(alpha) * n - std::cos(alpha) * radial;
    if (dir.normalized().dot(inward) < 0) return false;
  }
  return true;
}

// Contact forces push inward, against the outward normals.
inline bool closure(const ContactFrame& f, double mu) {
  return in_sampled_cone(f.v_a, -f.v_ql, mu, 4096) && in_sampled_cone(-f.v_a, -f.v_qr, mu, 4096);
}

}  // namespace oracle
