#pragma once

#include <array>
#include <span>
#include <vector>

#include <Eigen/Geometry>

#include "graspmetric/mesh.hpp"
#include "graspmetric/spatial_index.hpp"

namespace graspmetric {

// Gripper frame: +x is the approach direction, +y the closing direction and
// +z the finger height. The origin sits midway between the two fingertips.
//
//        palm           x = -(finger_length + finger_thickness) .. -finger_length
//   |<- w ->|
//   |       |           fingers span x = -finger_length .. 0
//   L       R           inner faces at y = -w/2 and y = +w/2
//
struct GripperModel {
  double max_width = 0.085;
  double finger_length = 0.06;
  double finger_thickness = 0.01;
  double finger_height = 0.02;
  std::vector<double> depth_levels{0.01, 0.02, 0.03, 0.04};
  double collision_margin = 0.001;

  // Throws ConfigError when an invariant is broken.
  void validate() const;
};

struct GraspPose {
  Mat3 rotation = Mat3::Identity();  // gripper -> world
  Vec3 translation = Vec3::Zero();
  double width = 0.0;
  double depth = 0.0;

  Vec3 approach() const { return rotation.col(0); }
  Vec3 closing() const { return rotation.col(1); }
  Vec3 binormal() const { return rotation.col(2); }

  Vec3 to_world(const Vec3& local) const { return rotation * local + translation; }
  Vec3 to_local(const Vec3& world) const { return rotation.transpose() * (world - translation); }

  GraspPose transformed(const RigidTransform& transform) const;
};

// Orthonormal with determinant +1 within `tolerance`.
bool is_rotation(const Mat3& rotation, double tolerance = 1e-6);

// Resolved two-finger contact geometry. `l` is the finger at -y, `r` at +y.
struct ContactFrame {
  Vec3 p_cl = Vec3::Zero();
  Vec3 p_cr = Vec3::Zero();
  Vec3 p_el = Vec3::Zero();
  Vec3 p_er = Vec3::Zero();
  Vec3 v_ql = Vec3::Zero();
  Vec3 v_qr = Vec3::Zero();
  Vec3 v_a = Vec3::Zero();
  std::size_t face_l = 0;
  std::size_t face_r = 0;
  bool valid = false;

  ContactFrame transformed(const RigidTransform& transform) const;
};

// Sweeps each finger's inner-face centerline (gripper z = 0, x in
// [-finger_length, 0]) along the closing axis; the first surface point met is
// the contact. Where a flat patch is met all at once, the contact is the
// patch point nearest the middle of its extent along the finger. The frame is
// invalid if a sweep misses, the object already overlaps a finger, or the
// contacts are farther apart than max_width.
ContactFrame resolve_contacts(const TriangleMesh& mesh, const GraspPose& grasp,
                              const GripperModel& gripper);

// Finger and palm boxes in the gripper frame for the pose's opening width.
std::array<Eigen::AlignedBox3d, 3> collision_boxes(const GripperModel& gripper, double width);

bool gripper_collides(std::span<const Vec3> scene_points, const GraspPose& grasp,
                      const GripperModel& gripper, double margin);
bool gripper_collides(std::span<const Vec3> scene_points, const GraspPose& grasp,
                      const GripperModel& gripper);
bool gripper_collides(const SpatialIndex& scene, const GraspPose& grasp,
                      const GripperModel& gripper, double margin);
bool gripper_collides(const SpatialIndex& scene, const GraspPose& grasp,
                      const GripperModel& gripper);

}  // namespace graspmetric
