#include "graspmetric/gripper.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "graspmetric/errors.hpp"
#include "graspmetric/triangle_bvh.hpp"

namespace graspmetric {

void GripperModel::validate() const {
  if (!(max_width > 0)) throw ConfigError("max_width must be > 0");
  if (!(finger_length > 0)) throw ConfigError("finger_length must be > 0");
  if (!(finger_thickness > 0)) throw ConfigError("finger_thickness must be > 0");
  if (!(finger_height > 0)) throw ConfigError("finger_height must be > 0");
  if (!(collision_margin >= 0)) throw ConfigError("collision_margin must be >= 0");
  if (depth_levels.empty()) throw ConfigError("depth_levels must not be empty");
  for (std::size_t i = 0; i < depth_levels.size(); ++i) {
    if (!(depth_levels[i] > 0)) throw ConfigError("depth_levels must be > 0");
    if (i > 0 && !(depth_levels[i] > depth_levels[i - 1])) {
      throw ConfigError("depth_levels must be strictly increasing");
    }
  }
}

bool is_rotation(const Mat3& rotation, double tolerance) {
  return (rotation.transpose() * rotation - Mat3::Identity()).cwiseAbs().maxCoeff() <= tolerance &&
         std::abs(rotation.determinant() - 1.0) <= tolerance;
}

GraspPose GraspPose::transformed(const RigidTransform& transform) const {
  GraspPose moved = *this;
  moved.rotation = transform.linear() * rotation;
  moved.translation = transform * translation;
  return moved;
}

ContactFrame ContactFrame::transformed(const RigidTransform& transform) const {
  ContactFrame moved = *this;
  const Mat3 r = transform.linear();
  moved.p_cl = transform * p_cl;
  moved.p_cr = transform * p_cr;
  moved.p_el = transform * p_el;
  moved.p_er = transform * p_er;
  moved.v_ql = r * v_ql;
  moved.v_qr = r * v_qr;
  moved.v_a = r * v_a;
  return moved;
}

namespace {

// Equal-depth tolerance along the closing axis, meters.
constexpr double kTieTolerance = 1e-9;

struct Segment2 {
  Eigen::Vector2d a;  // (x, y) in the gripper frame
  Eigen::Vector2d b;
  std::size_t face;
  double normal_y;  // face normal's y component in the gripper frame
};

// Liang-Barsky clip of segment a->b against [xmin,xmax] x [ymin,ymax].
std::optional<std::pair<Eigen::Vector2d, Eigen::Vector2d>> clip(const Eigen::Vector2d& a,
                                                               const Eigen::Vector2d& b,
                                                               const Eigen::AlignedBox2d& rect) {
  double t0 = 0.0;
  double t1 = 1.0;
  const Eigen::Vector2d d = b - a;
  const double p[4] = {-d.x(), d.x(), -d.y(), d.y()};
  const double q[4] = {a.x() - rect.min().x(), rect.max().x() - a.x(), a.y() - rect.min().y(),
                       rect.max().y() - a.y()};
  for (int i = 0; i < 4; ++i) {
    if (p[i] == 0.0) {
      if (q[i] < 0.0) return std::nullopt;
      continue;
    }
    const double t = q[i] / p[i];
    if (p[i] < 0.0) {
      t0 = std::max(t0, t);
    } else {
      t1 = std::min(t1, t);
    }
    if (t0 > t1) return std::nullopt;
  }
  return std::make_pair(Eigen::Vector2d(a + t0 * d), Eigen::Vector2d(a + t1 * d));
}

// Intersection of a triangle (gripper-frame coordinates) with the plane z=0.
std::optional<std::pair<Eigen::Vector2d, Eigen::Vector2d>> slice(const std::array<Vec3, 3>& tri) {
  Eigen::Vector2d pts[3];
  int n = 0;
  int on_plane = 0;
  for (const Vec3& p : tri) on_plane += p.z() == 0.0 ? 1 : 0;
  if (on_plane == 3) return std::nullopt;  // coplanar: neighbors carry its edges
  for (int i = 0; i < 3; ++i) {
    const Vec3& p = tri[i];
    const Vec3& q = tri[(i + 1) % 3];
    if (p.z() == 0.0) {
      pts[n++] = p.head<2>();
    } else if ((p.z() < 0.0 && q.z() > 0.0) || (p.z() > 0.0 && q.z() < 0.0)) {
      const double t = p.z() / (p.z() - q.z());
      pts[n++] = (p + t * (q - p)).head<2>();
    }
    if (n == 2) break;
  }
  if (n == 0) return std::nullopt;
  if (n == 1) return std::make_pair(pts[0], pts[0]);
  return std::make_pair(pts[0], pts[1]);
}

struct ContactChoice {
  Eigen::Vector2d point;
  std::size_t face;
};

// First contact of a finger sweeping toward +y (the left finger). For the
// right finger the caller mirrors y.
std::optional<ContactChoice> first_contact(const std::vector<Segment2>& segments) {
  if (segments.empty()) return std::nullopt;
  double y_min = std::numeric_limits<double>::infinity();
  for (const Segment2& s : segments) y_min = std::min({y_min, s.a.y(), s.b.y()});

  struct Piece {
    double lo, hi;
    const Segment2* seg;
  };
  std::vector<Piece> tied;
  for (const Segment2& s : segments) {
    const bool a_tied = s.a.y() <= y_min + kTieTolerance;
    const bool b_tied = s.b.y() <= y_min + kTieTolerance;
    if (a_tied && b_tied) {
      tied.push_back({std::min(s.a.x(), s.b.x()), std::max(s.a.x(), s.b.x()), &s});
    } else if (a_tied) {
      tied.push_back({s.a.x(), s.a.x(), &s});
    } else if (b_tied) {
      tied.push_back({s.b.x(), s.b.x(), &s});
    }
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const Piece& p : tied) {
    lo = std::min(lo, p.lo);
    hi = std::max(hi, p.hi);
  }
  const double mid = 0.5 * (lo + hi);

  // Sharp edges put the same point on several faces; prefer the face that
  // looks most directly at the finger, then smaller x, then lower face index.
  // Comparisons carry a tolerance so the choice survives rigid motions.
  double best_gap = std::numeric_limits<double>::infinity();
  for (const Piece& p : tied) best_gap = std::min(best_gap, std::abs(std::clamp(mid, p.lo, p.hi) - mid));
  const Piece* best = nullptr;
  double best_x = 0.0;
  for (const Piece& p : tied) {
    const double x = std::clamp(mid, p.lo, p.hi);
    if (std::abs(x - mid) > best_gap + kTieTolerance) continue;
    bool better = !best;
    if (best) {
      const double facing = -p.seg->normal_y;
      const double best_facing = -best->seg->normal_y;
      if (facing > best_facing + kTieTolerance) {
        better = true;
      } else if (facing >= best_facing - kTieTolerance) {
        if (x < best_x - kTieTolerance) {
          better = true;
        } else if (x <= best_x + kTieTolerance) {
          better = p.seg->face < best->seg->face;
        }
      }
    }
    if (better) {
      best = &p;
      best_x = x;
    }
  }
  const Segment2& s = *best->seg;
  const double dx = s.b.x() - s.a.x();
  const double t = dx == 0.0 ? 0.0 : (best_x - s.a.x()) / dx;
  const double y = dx == 0.0 ? std::min(s.a.y(), s.b.y()) : s.a.y() + t * (s.b.y() - s.a.y());
  return ContactChoice{Eigen::Vector2d(best_x, y), s.face};
}

}  // namespace

ContactFrame resolve_contacts(const TriangleMesh& mesh, const GraspPose& grasp,
                              const GripperModel& gripper) {
  ContactFrame frame;
  const double w = grasp.width;
  if (!(w > 0.0) || w > gripper.max_width + 1e-12) return frame;

  const double half = w / 2;
  const double reach = half + gripper.finger_thickness;
  const Eigen::AlignedBox2d strip(Eigen::Vector2d(-gripper.finger_length, -reach),
                                  Eigen::Vector2d(0.0, reach));

  Eigen::AlignedBox3d query;
  for (double x : {strip.min().x(), strip.max().x()}) {
    for (double y : {strip.min().y(), strip.max().y()}) query.extend(grasp.to_world(Vec3(x, y, 0)));
  }

  const auto& verts = mesh.vertices();
  std::vector<Segment2> segments;
  mesh.bvh().for_each_overlapping(query, [&](std::size_t f) {
    const Face& face = mesh.faces()[f];
    const std::array<Vec3, 3> local{grasp.to_local(verts[face[0]]), grasp.to_local(verts[face[1]]),
                                    grasp.to_local(verts[face[2]])};
    const auto cut = slice(local);
    if (!cut) return;
    const auto clipped = clip(cut->first, cut->second, strip);
    if (!clipped) return;
    const double normal_y = grasp.closing().dot(mesh.face_normals()[f]);
    segments.push_back({clipped->first, clipped->second, f, normal_y});
  });

  const auto left = first_contact(segments);
  if (!left || left->point.y() < -half) return frame;

  std::vector<Segment2> mirrored = segments;
  for (Segment2& s : mirrored) {
    s.a.y() = -s.a.y();
    s.b.y() = -s.b.y();
    s.normal_y = -s.normal_y;
  }
  auto right = first_contact(mirrored);
  if (!right || right->point.y() < -half) return frame;
  right->point.y() = -right->point.y();

  frame.p_cl = grasp.to_world(Vec3(left->point.x(), left->point.y(), 0.0));
  frame.p_cr = grasp.to_world(Vec3(right->point.x(), right->point.y(), 0.0));
  const Vec3 span = frame.p_cr - frame.p_cl;
  // Contacts offset along the approach can be farther apart than the jaw
  // opening; such a pair cannot be closed on.
  if (span.norm() < 1e-12 || span.norm() > gripper.max_width) return frame;

  frame.p_el = grasp.to_world(Vec3(0.0, left->point.y(), 0.0));
  frame.p_er = grasp.to_world(Vec3(0.0, right->point.y(), 0.0));
  frame.face_l = left->face;
  frame.face_r = right->face;
  frame.v_ql = mesh.interpolated_normal(left->face, frame.p_cl);
  frame.v_qr = mesh.interpolated_normal(right->face, frame.p_cr);
  frame.v_a = span.normalized();
  frame.valid = true;
  return frame;
}

std::array<Eigen::AlignedBox3d, 3> collision_boxes(const GripperModel& g, double width) {
  const double half = width / 2;
  const double h = g.finger_height / 2;
  const double t = g.finger_thickness;
  const double l = g.finger_length;
  return {Eigen::AlignedBox3d(Vec3(-l, -half - t, -h), Vec3(0, -half, h)),
          Eigen::AlignedBox3d(Vec3(-l, half, -h), Vec3(0, half + t, h)),
          Eigen::AlignedBox3d(Vec3(-l - t, -half - t, -h), Vec3(-l, half + t, h))};
}

namespace {

std::array<Eigen::AlignedBox3d, 3> inflated_boxes(const GripperModel& g, double width,
                                                  double margin) {
  auto boxes = collision_boxes(g, width);
  for (auto& b : boxes) {
    b.min().array() -= margin;
    b.max().array() += margin;
  }
  return boxes;
}

bool inside_any(const std::array<Eigen::AlignedBox3d, 3>& boxes, const Vec3& local) {
  return std::any_of(boxes.begin(), boxes.end(),
                     [&](const Eigen::AlignedBox3d& b) { return b.contains(local); });
}

}  // namespace

bool gripper_collides(std::span<const Vec3> scene_points, const GraspPose& grasp,
                      const GripperModel& gripper, double margin) {
  const auto boxes = inflated_boxes(gripper, grasp.width, margin);
  return std::any_of(scene_points.begin(), scene_points.end(),
                     [&](const Vec3& p) { return inside_any(boxes, grasp.to_local(p)); });
}

bool gripper_collides(std::span<const Vec3> scene_points, const GraspPose& grasp,
                      const GripperModel& gripper) {
  return gripper_collides(scene_points, grasp, gripper, gripper.collision_margin);
}

bool gripper_collides(const SpatialIndex& scene, const GraspPose& grasp,
                      const GripperModel& gripper, double margin) {
  const auto boxes = inflated_boxes(gripper, grasp.width, margin);
  for (const auto& box : boxes) {
    Eigen::AlignedBox3d world;
    for (int c = 0; c < 8; ++c) {
      world.extend(grasp.to_world(box.corner(static_cast<Eigen::AlignedBox3d::CornerType>(c))));
    }
    const bool hit = scene.any_in_box(world, [&](std::size_t i) {
      return box.contains(grasp.to_local(scene.points()[i]));
    });
    if (hit) return true;
  }
  return false;
}

bool gripper_collides(const SpatialIndex& scene, const GraspPose& grasp,
                      const GripperModel& gripper) {
  return gripper_collides(scene, grasp, gripper, gripper.collision_margin);
}

}  // namespace graspmetric
