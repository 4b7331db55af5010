#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Geometry>

namespace graspmetric {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Face = std::array<std::uint32_t, 3>;
using RigidTransform = Eigen::Isometry3d;

class TriangleBvh;

// Densified surface point set. Every sample remembers the face it was drawn
// from; normals are the interpolated corner normals at the sample.
struct SurfaceSamples {
  std::vector<Vec3> points;
  std::vector<Vec3> normals;
  std::vector<std::uint32_t> faces;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

struct MeshBuildOptions {
  // Corner normals only average faces whose normals are within this angle of
  // the corner's own face, so box edges keep flat-face normals.
  double crease_angle_rad = 0.7853981633974483;  // 45 degrees
};

struct MeshBuildReport {
  std::size_t degenerate_faces_dropped = 0;
  bool flipped_orientation = false;
};

// Immutable indexed triangle mesh with outward normals. Construct through
// `TriangleMesh::build`; every query method is safe for concurrent use.
class TriangleMesh {
 public:
  static TriangleMesh build(std::vector<Vec3> vertices, std::vector<Face> faces,
                            const MeshBuildOptions& options = {},
                            MeshBuildReport* report = nullptr);

  const std::vector<Vec3>& vertices() const { return vertices_; }
  const std::vector<Face>& faces() const { return faces_; }
  const std::vector<Vec3>& vertex_normals() const { return vertex_normals_; }
  const std::vector<Vec3>& face_normals() const { return face_normals_; }
  const std::array<Vec3, 3>& corner_normals(std::size_t face) const {
    return corner_normals_[face];
  }
  const SurfaceSamples& surface_points() const { return surface_points_; }
  const TriangleBvh& bvh() const { return *bvh_; }

  // Every undirected edge is shared by exactly two faces with opposite
  // winding.
  bool watertight() const { return watertight_; }
  double signed_volume() const;
  double surface_area() const;
  Eigen::AlignedBox3d bounds() const;

  // Unit normal at `point` (assumed on `face`), barycentric blend of the
  // face's corner normals.
  Vec3 interpolated_normal(std::size_t face, const Vec3& point) const;

  TriangleMesh with_surface_points(SurfaceSamples samples) const;

  // Rigidly moved copy; surface samples move with the mesh rather than being
  // redrawn.
  TriangleMesh transformed(const RigidTransform& transform) const;

  // Uniformly rescaled copy (used by --unit-scale).
  TriangleMesh scaled(double factor) const;

 private:
  TriangleMesh() = default;

  std::vector<Vec3> vertices_;
  std::vector<Face> faces_;
  std::vector<Vec3> vertex_normals_;
  std::vector<Vec3> face_normals_;
  std::vector<std::array<Vec3, 3>> corner_normals_;
  SurfaceSamples surface_points_;
  std::shared_ptr<const TriangleBvh> bvh_;
  bool watertight_ = false;
  MeshBuildOptions options_;
};

enum class MassMethod { volume_centroid, area_centroid };

struct MassProperties {
  Vec3 gravity_center = Vec3::Zero();
  double volume = 0.0;
  MassMethod method_used = MassMethod::area_centroid;
};

MassProperties mass_properties(const TriangleMesh& mesh);

struct SurfaceHit {
  Vec3 point;
  Vec3 normal;
  double distance = 0.0;
  std::size_t face = 0;
};

// Globally nearest point on any triangle of the mesh.
SurfaceHit closest_surface_point(const TriangleMesh& mesh, const Vec3& query);

// Area-weighted uniform samples at `density` points per square meter, with at
// least `min_samples` and at most `max_samples` points.
SurfaceSamples sample_surface(const TriangleMesh& mesh, double density, std::size_t min_samples,
                              std::size_t max_samples, std::uint64_t seed);

enum class MeshFormat { obj, ply };

struct LoadedMesh {
  TriangleMesh mesh;
  MeshBuildReport report;
};

// Reads an OBJ (v/f records) or PLY (ascii or binary) triangle mesh. Polygons
// with more than three corners are fan-triangulated.
LoadedMesh load_mesh(const std::filesystem::path& path, MeshFormat format,
                     const MeshBuildOptions& options = {});
// Chooses the format from the file extension.
LoadedMesh load_mesh(const std::filesystem::path& path, const MeshBuildOptions& options = {});

void write_obj(const TriangleMesh& mesh, const std::filesystem::path& path);
void write_ply(const TriangleMesh& mesh, const std::filesystem::path& path, bool binary);

}  // namespace graspmetric
