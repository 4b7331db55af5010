#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include <unistd.h>

#include "graspmetric/config.hpp"
#include "graspmetric/gripper.hpp"
#include "graspmetric/mesh.hpp"

namespace testsupport {

using graspmetric::Mat3;
using graspmetric::RigidTransform;
using graspmetric::Vec3;

inline Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vec3 v;
  do {
    v = Vec3(n(rng), n(rng), n(rng));
  } while (v.norm() < 1e-6);
  return v.normalized();
}

inline Mat3 random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
  q.normalize();
  return q.toRotationMatrix();
}

inline RigidTransform random_rigid(std::mt19937_64& rng, double max_shift) {
  std::uniform_real_distribution<double> u(-max_shift, max_shift);
  RigidTransform t = RigidTransform::Identity();
  t.linear() = random_rotation(rng);
  t.translation() = Vec3(u(rng), u(rng), u(rng));
  return t;
}

// Rotation with the given approach (x) and closing (y) axes.
inline Mat3 frame_from(const Vec3& approach, const Vec3& closing) {
  Mat3 r;
  r.col(0) = approach.normalized();
  r.col(1) = closing.normalized();
  r.col(2) = r.col(0).cross(r.col(1));
  return r;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::uint64_t counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("graspmetric_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

// Grid small enough for unit tests; everything else at defaults.
inline graspmetric::Config small_config() {
  graspmetric::Config c;
  c.grid.seeds = 24;
  c.grid.views = 40;
  c.grid.rotations = 12;
  c.sample_density = 250000.0;
  c.max_surface_samples = 6000;
  return c;
}

}  // namespace testsupport
