#include "graspmetric/primitives.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <utility>

namespace graspmetric::primitives {

namespace {

void add_quad(std::vector<Face>& faces, std::uint32_t a, std::uint32_t b, std::uint32_t c,
              std::uint32_t d) {
  faces.push_back({a, b, c});
  faces.push_back({a, c, d});
}

}  // namespace

TriangleMesh box(double size_x, double size_y, double size_z) {
  const double x = size_x / 2;
  const double y = size_y / 2;
  const double z = size_z / 2;
  std::vector<Vec3> v{{-x, -y, -z}, {x, -y, -z}, {x, y, -z}, {-x, y, -z},
                      {-x, -y, z},  {x, -y, z},  {x, y, z},  {-x, y, z}};
  std::vector<Face> f;
  add_quad(f, 0, 3, 2, 1);  // bottom
  add_quad(f, 4, 5, 6, 7);  // top
  add_quad(f, 0, 1, 5, 4);  // -y
  add_quad(f, 2, 3, 7, 6);  // +y
  add_quad(f, 1, 2, 6, 5);  // +x
  add_quad(f, 3, 0, 4, 7);  // -x
  return TriangleMesh::build(std::move(v), std::move(f));
}

TriangleMesh icosphere(double radius, int subdivisions) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> v{{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0},
                      {0, -1, t}, {0, 1, t}, {0, -1, -t}, {0, 1, -t},
                      {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (Vec3& p : v) p.normalize();
  std::vector<Face> f{{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                      {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                      {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                      {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (int level = 0; level < subdivisions; ++level) {
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> midpoints;
    const auto midpoint = [&](std::uint32_t a, std::uint32_t b) {
      const auto key = std::minmax(a, b);
      auto it = midpoints.find(key);
      if (it != midpoints.end()) return it->second;
      v.push_back(((v[a] + v[b]) / 2).normalized());
      const auto idx = static_cast<std::uint32_t>(v.size() - 1);
      midpoints.emplace(key, idx);
      return idx;
    };
    std::vector<Face> next;
    next.reserve(f.size() * 4);
    for (const Face& face : f) {
      const std::uint32_t ab = midpoint(face[0], face[1]);
      const std::uint32_t bc = midpoint(face[1], face[2]);
      const std::uint32_t ca = midpoint(face[2], face[0]);
      next.push_back({face[0], ab, ca});
      next.push_back({face[1], bc, ab});
      next.push_back({face[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    f = std::move(next);
  }
  for (Vec3& p : v) p *= radius;
  return TriangleMesh::build(std::move(v), std::move(f));
}

TriangleMesh cylinder(double radius, double height, int segments) {
  std::vector<Vec3> v;
  std::vector<Face> f;
  const double h = height / 2;
  for (int i = 0; i < segments; ++i) {
    const double a = 2.0 * std::numbers::pi * i / segments;
    v.emplace_back(radius * std::cos(a), radius * std::sin(a), -h);
    v.emplace_back(radius * std::cos(a), radius * std::sin(a), h);
  }
  const auto bottom_center = static_cast<std::uint32_t>(v.size());
  v.emplace_back(0, 0, -h);
  const auto top_center = static_cast<std::uint32_t>(v.size());
  v.emplace_back(0, 0, h);
  const auto n = static_cast<std::uint32_t>(segments);
  for (std::uint32_t i = 0; i < n; ++i) {
    const std::uint32_t j = (i + 1) % n;
    add_quad(f, 2 * i, 2 * j, 2 * j + 1, 2 * i + 1);
    f.push_back({bottom_center, 2 * j, 2 * i});
    f.push_back({top_center, 2 * i + 1, 2 * j + 1});
  }
  return TriangleMesh::build(std::move(v), std::move(f));
}

TriangleMesh l_prism(double scale) {
  // L-shaped profile in the xz-plane, extruded along y over [0, 1].
  const std::vector<std::pair<double, double>> profile{{0, 0}, {2, 0}, {2, 2},
                                                       {1, 2}, {1, 1}, {0, 1}};
  std::vector<Vec3> v;
  for (const auto& [x, z] : profile) v.emplace_back(x * scale, 0.0, z * scale);
  for (const auto& [x, z] : profile) v.emplace_back(x * scale, scale, z * scale);
  std::vector<Face> f;
  // Profile triangles share the reflex corner (index 4); front faces -y.
  const std::vector<Face> cap{{0, 4, 5}, {0, 1, 4}, {1, 2, 4}, {4, 2, 3}};
  for (const Face& c : cap) {
    f.push_back({c[0], c[1], c[2]});
    f.push_back({c[0] + 6, c[2] + 6, c[1] + 6});
  }
  for (std::uint32_t i = 0; i < 6; ++i) {
    const std::uint32_t j = (i + 1) % 6;
    add_quad(f, i, i + 6, j + 6, j);
  }
  return TriangleMesh::build(std::move(v), std::move(f));
}

}  // namespace graspmetric::primitives
