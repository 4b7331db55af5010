#include "graspmetric/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <utility>

#include "graspmetric/errors.hpp"
#include "graspmetric/triangle_bvh.hpp"

namespace graspmetric {

namespace {

Vec3 raw_face_normal(const std::vector<Vec3>& v, const Face& f) {
  return (v[f[1]] - v[f[0]]).cross(v[f[2]] - v[f[0]]);
}

// Max's weight sin(angle) / (|u| |w|): exact normals for vertices lying on a
// sphere, and reduces to plain face normals on flat patches.
double corner_weight(const Vec3& apex, const Vec3& a, const Vec3& b) {
  const Vec3 u = a - apex;
  const Vec3 w = b - apex;
  return u.cross(w).norm() / (u.squaredNorm() * w.squaredNorm());
}

// Watertight + consistently wound: each directed edge appears once and its
// reverse appears once.
bool is_closed_and_consistent(const std::vector<Face>& faces) {
  std::map<std::pair<std::uint32_t, std::uint32_t>, int> directed;
  for (const Face& f : faces) {
    for (int j = 0; j < 3; ++j) {
      if (++directed[{f[j], f[(j + 1) % 3]}] > 1) return false;
    }
  }
  for (const auto& [edge, count] : directed) {
    if (!directed.contains({edge.second, edge.first})) return false;
  }
  return !faces.empty();
}

double signed_volume_about(const std::vector<Vec3>& v, const std::vector<Face>& faces,
                           const Vec3& origin) {
  double six_volume = 0.0;
  for (const Face& f : faces) {
    six_volume += (v[f[0]] - origin).dot((v[f[1]] - origin).cross(v[f[2]] - origin));
  }
  return six_volume / 6.0;
}

Vec3 bounds_center(const std::vector<Vec3>& v) {
  Eigen::AlignedBox3d box;
  for (const Vec3& p : v) box.extend(p);
  return box.center();
}

}  // namespace

TriangleMesh TriangleMesh::build(std::vector<Vec3> vertices, std::vector<Face> faces,
                                 const MeshBuildOptions& options, MeshBuildReport* report) {
  MeshBuildReport local_report;
  for (const Face& f : faces) {
    for (std::uint32_t idx : f) {
      if (idx >= vertices.size()) {
        throw ParseError("face index " + std::to_string(idx) + " out of range (" +
                         std::to_string(vertices.size()) + " vertices)");
      }
    }
  }

  Eigen::AlignedBox3d box;
  for (const Vec3& p : vertices) box.extend(p);
  const double diag = vertices.empty() ? 0.0 : box.diagonal().norm();
  const double min_area2 = std::max(1e-30, 1e-24 * diag * diag * diag * diag);

  std::vector<Face> kept;
  kept.reserve(faces.size());
  for (const Face& f : faces) {
    const bool repeated = f[0] == f[1] || f[1] == f[2] || f[0] == f[2];
    if (repeated || raw_face_normal(vertices, f).squaredNorm() <= min_area2) {
      ++local_report.degenerate_faces_dropped;
      continue;
    }
    kept.push_back(f);
  }
  if (kept.empty()) throw EmptyMesh("mesh has no valid faces");

  TriangleMesh mesh;
  mesh.options_ = options;
  mesh.vertices_ = std::move(vertices);
  mesh.faces_ = std::move(kept);
  mesh.watertight_ = is_closed_and_consistent(mesh.faces_);

  if (mesh.watertight_) {
    const Vec3 origin = bounds_center(mesh.vertices_);
    if (signed_volume_about(mesh.vertices_, mesh.faces_, origin) < 0.0) {
      for (Face& f : mesh.faces_) std::swap(f[1], f[2]);
      local_report.flipped_orientation = true;
    }
  } else {
    // Open surfaces: each face points away from the bounding-box center.
    const Vec3 center = bounds_center(mesh.vertices_);
    for (Face& f : mesh.faces_) {
      const Vec3 centroid =
          (mesh.vertices_[f[0]] + mesh.vertices_[f[1]] + mesh.vertices_[f[2]]) / 3.0;
      if (raw_face_normal(mesh.vertices_, f).dot(centroid - center) < 0.0) {
        std::swap(f[1], f[2]);
        local_report.flipped_orientation = true;
      }
    }
  }

  const std::size_t nv = mesh.vertices_.size();
  const std::size_t nf = mesh.faces_.size();
  mesh.face_normals_.resize(nf);
  for (std::size_t i = 0; i < nf; ++i) {
    mesh.face_normals_[i] = raw_face_normal(mesh.vertices_, mesh.faces_[i]).normalized();
  }

  // Weighted contributions per (face, corner).
  std::vector<std::vector<std::pair<std::uint32_t, double>>> incident(nv);
  for (std::size_t i = 0; i < nf; ++i) {
    const Face& f = mesh.faces_[i];
    for (int j = 0; j < 3; ++j) {
      const double weight = corner_weight(mesh.vertices_[f[j]], mesh.vertices_[f[(j + 1) % 3]],
                                          mesh.vertices_[f[(j + 2) % 3]]);
      incident[f[j]].emplace_back(static_cast<std::uint32_t>(i), weight);
    }
  }

  const Vec3 center = bounds_center(mesh.vertices_);
  mesh.vertex_normals_.resize(nv);
  for (std::size_t v = 0; v < nv; ++v) {
    Vec3 sum = Vec3::Zero();
    for (const auto& [face, weight] : incident[v]) sum += weight * mesh.face_normals_[face];
    if (sum.squaredNorm() < 1e-30) {
      // Unreferenced or fully cancelling vertex: fall back to radial.
      sum = mesh.vertices_[v] - center;
      if (sum.squaredNorm() < 1e-30) sum = Vec3::UnitZ();
    }
    mesh.vertex_normals_[v] = sum.normalized();
  }

  const double cos_crease = std::cos(options.crease_angle_rad);
  mesh.corner_normals_.resize(nf);
  for (std::size_t i = 0; i < nf; ++i) {
    const Vec3& own = mesh.face_normals_[i];
    for (int j = 0; j < 3; ++j) {
      Vec3 sum = Vec3::Zero();
      for (const auto& [face, weight] : incident[mesh.faces_[i][j]]) {
        if (mesh.face_normals_[face].dot(own) >= cos_crease) {
          sum += weight * mesh.face_normals_[face];
        }
      }
      mesh.corner_normals_[i][j] = sum.squaredNorm() > 1e-30 ? Vec3(sum.normalized()) : own;
    }
  }

  mesh.bvh_ = std::make_shared<const TriangleBvh>(mesh.vertices_, mesh.faces_);
  if (report) *report = local_report;
  return mesh;
}

double TriangleMesh::signed_volume() const {
  return signed_volume_about(vertices_, faces_, bounds_center(vertices_));
}

double TriangleMesh::surface_area() const {
  double area = 0.0;
  for (const Face& f : faces_) area += 0.5 * raw_face_normal(vertices_, f).norm();
  return area;
}

Eigen::AlignedBox3d TriangleMesh::bounds() const {
  Eigen::AlignedBox3d box;
  for (const Vec3& p : vertices_) box.extend(p);
  return box;
}

Vec3 TriangleMesh::interpolated_normal(std::size_t face, const Vec3& point) const {
  const Face& f = faces_[face];
  const Vec3& a = vertices_[f[0]];
  const Vec3& b = vertices_[f[1]];
  const Vec3& c = vertices_[f[2]];
  // Barycentrics of the point's projection onto the face plane.
  const Vec3 v0 = b - a;
  const Vec3 v1 = c - a;
  const Vec3 v2 = point - a;
  const double d00 = v0.dot(v0);
  const double d01 = v0.dot(v1);
  const double d11 = v1.dot(v1);
  const double d20 = v2.dot(v0);
  const double d21 = v2.dot(v1);
  const double denom = d00 * d11 - d01 * d01;
  double v = (d11 * d20 - d01 * d21) / denom;
  double w = (d00 * d21 - d01 * d20) / denom;
  v = std::clamp(v, 0.0, 1.0);
  w = std::clamp(w, 0.0, 1.0 - v);
  const double u = 1.0 - v - w;
  const auto& n = corner_normals_[face];
  const Vec3 blended = u * n[0] + v * n[1] + w * n[2];
  if (blended.squaredNorm() < 1e-24) return face_normals_[face];
  return blended.normalized();
}

TriangleMesh TriangleMesh::with_surface_points(SurfaceSamples samples) const {
  TriangleMesh copy = *this;
  copy.surface_points_ = std::move(samples);
  return copy;
}

TriangleMesh TriangleMesh::transformed(const RigidTransform& transform) const {
  std::vector<Vec3> moved;
  moved.reserve(vertices_.size());
  for (const Vec3& p : vertices_) moved.push_back(transform * p);
  TriangleMesh result = build(std::move(moved), faces_, options_);
  SurfaceSamples samples = surface_points_;
  for (Vec3& p : samples.points) p = transform * p;
  for (Vec3& n : samples.normals) n = transform.linear() * n;
  result.surface_points_ = std::move(samples);
  return result;
}

TriangleMesh TriangleMesh::scaled(double factor) const {
  std::vector<Vec3> moved;
  moved.reserve(vertices_.size());
  for (const Vec3& p : vertices_) moved.push_back(p * factor);
  TriangleMesh result = build(std::move(moved), faces_, options_);
  SurfaceSamples samples = surface_points_;
  for (Vec3& p : samples.points) p *= factor;
  result.surface_points_ = std::move(samples);
  return result;
}

MassProperties mass_properties(const TriangleMesh& mesh) {
  const auto& v = mesh.vertices();
  const Vec3 origin = mesh.bounds().center();
  MassProperties props;

  if (mesh.watertight()) {
    double six_volume = 0.0;
    Vec3 weighted = Vec3::Zero();
    for (const Face& f : mesh.faces()) {
      const Vec3 a = v[f[0]] - origin;
      const Vec3 b = v[f[1]] - origin;
      const Vec3 c = v[f[2]] - origin;
      const double det = a.dot(b.cross(c));
      six_volume += det;
      // Tetrahedron (0, a, b, c) has centroid (a + b + c) / 4.
      weighted += det * (a + b + c);
    }
    if (six_volume > 0.0) {
      props.volume = six_volume / 6.0;
      props.gravity_center = origin + weighted / (4.0 * six_volume);
      props.method_used = MassMethod::volume_centroid;
      return props;
    }
  }

  double area = 0.0;
  Vec3 weighted = Vec3::Zero();
  for (const Face& f : mesh.faces()) {
    const double a = 0.5 * (v[f[1]] - v[f[0]]).cross(v[f[2]] - v[f[0]]).norm();
    area += a;
    weighted += a * ((v[f[0]] - origin) + (v[f[1]] - origin) + (v[f[2]] - origin)) / 3.0;
  }
  props.gravity_center = origin + weighted / area;
  props.volume = std::abs(mesh.signed_volume());
  props.method_used = MassMethod::area_centroid;
  return props;
}

SurfaceHit closest_surface_point(const TriangleMesh& mesh, const Vec3& query) {
  const auto best = mesh.bvh().closest(query);
  SurfaceHit hit;
  hit.face = best.face;
  hit.point = best.point;
  hit.distance = std::sqrt(best.distance_sq);
  hit.normal = mesh.interpolated_normal(best.face, best.point);
  return hit;
}

SurfaceSamples sample_surface(const TriangleMesh& mesh, double density, std::size_t min_samples,
                              std::size_t max_samples, std::uint64_t seed) {
  const auto& v = mesh.vertices();
  const auto& faces = mesh.faces();
  std::vector<double> cumulative(faces.size());
  double total = 0.0;
  for (std::size_t i = 0; i < faces.size(); ++i) {
    const Face& f = faces[i];
    total += 0.5 * (v[f[1]] - v[f[0]]).cross(v[f[2]] - v[f[0]]).norm();
    cumulative[i] = total;
  }

  const double wanted = std::round(total * density);
  const auto count = static_cast<std::size_t>(
      std::clamp(wanted, static_cast<double>(min_samples), static_cast<double>(max_samples)));

  std::mt19937_64 rng(seed);
  // 53 random mantissa bits; independent of the standard library's
  // distribution implementations.
  const auto uniform = [&rng]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };

  SurfaceSamples samples;
  samples.points.reserve(count);
  samples.normals.reserve(count);
  samples.faces.reserve(count);
  for (std::size_t s = 0; s < count; ++s) {
    const double target = uniform() * total;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
    if (it == cumulative.end()) --it;
    const auto face = static_cast<std::size_t>(it - cumulative.begin());
    double r1 = uniform();
    double r2 = uniform();
    if (r1 + r2 > 1.0) {
      r1 = 1.0 - r1;
      r2 = 1.0 - r2;
    }
    const Face& f = faces[face];
    const Vec3 p = v[f[0]] + r1 * (v[f[1]] - v[f[0]]) + r2 * (v[f[2]] - v[f[0]]);
    samples.points.push_back(p);
    samples.normals.push_back(mesh.interpolated_normal(face, p));
    samples.faces.push_back(static_cast<std::uint32_t>(face));
  }
  return samples;
}

}  // namespace graspmetric
