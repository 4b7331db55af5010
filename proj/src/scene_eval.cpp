#include "graspmetric/scene_eval.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "graspmetric/errors.hpp"

namespace graspmetric {

double rotation_distance(const Mat3& r1, const Mat3& r2) {
  const double c = ((r1.transpose() * r2).trace() - 1.0) / 2.0;
  return std::acos(std::clamp(c, -1.0, 1.0));
}

std::vector<std::size_t> grasp_nms_indices(std::span<const PredictedGrasp> grasps,
                                           double trans_thresh, double rot_thresh) {
  std::vector<std::size_t> order(grasps.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return grasps[a].predicted_score > grasps[b].predicted_score;
  });

  std::vector<std::size_t> kept;
  for (std::size_t i : order) {
    const GraspPose& g = grasps[i].grasp;
    const bool suppressed = std::any_of(kept.begin(), kept.end(), [&](std::size_t j) {
      const GraspPose& k = grasps[j].grasp;
      return (g.translation - k.translation).norm() < trans_thresh &&
             rotation_distance(g.rotation, k.rotation) < rot_thresh;
    });
    if (!suppressed) kept.push_back(i);
  }
  return kept;
}

std::vector<PredictedGrasp> grasp_nms(std::span<const PredictedGrasp> grasps, double trans_thresh,
                                      double rot_thresh) {
  std::vector<PredictedGrasp> out;
  for (std::size_t i : grasp_nms_indices(grasps, trans_thresh, rot_thresh)) out.push_back(grasps[i]);
  return out;
}

EvalReport ap_from_scores(std::span<const double> true_scores, std::span<const double> thresholds,
                          std::size_t top_k) {
  EvalReport report;
  const std::size_t n = std::min(true_scores.size(), top_k);
  report.true_scores.assign(true_scores.begin(), true_scores.begin() + static_cast<std::ptrdiff_t>(n));
  report.empty_after_filtering = n == 0;

  double map_sum = 0.0;
  for (double tau : thresholds) {
    double ap = 0.0;
    if (top_k > 0) {
      std::size_t hits = 0;
      for (std::size_t k = 1; k <= top_k; ++k) {
        if (k <= n && true_scores[k - 1] >= tau) ++hits;
        ap += static_cast<double>(hits) / static_cast<double>(k);
      }
      ap /= static_cast<double>(top_k);
    }
    report.ap_at_threshold.emplace_back(tau, ap);
    map_sum += ap;
  }
  report.map_value = thresholds.empty() ? 0.0 : map_sum / static_cast<double>(thresholds.size());
  return report;
}

double true_grasp_score(const GraspPose& world_grasp, const ObjectInstance& instance,
                        const ObjectModel& model, const EvalOptions& options) {
  if (!(world_grasp.width > 0.0) || world_grasp.width > options.gripper.max_width) return 0.0;
  const GraspPose local = world_grasp.transformed(instance.pose.inverse(Eigen::Isometry));
  const ContactFrame frame = resolve_contacts(*model.mesh, local, options.gripper);
  if (!frame.valid) return 0.0;
  const ScoreBreakdown partial =
      partial_breakdown(frame, *model.index, model.mass.gravity_center, options.metrics);
  return normalize_one(partial, model.bounds, options.metrics.weights).s_hybrid;
}

namespace {

const ObjectInstance& associate(const PredictedGrasp& p, const SceneLayout& scene,
                                const ObjectLibrary& library) {
  if (p.object_id) {
    for (const ObjectInstance& inst : scene.instances) {
      if (inst.object_id == *p.object_id) return inst;
    }
    throw UnknownObjectId(*p.object_id);
  }
  const ObjectInstance* best = nullptr;
  double best_d = 0.0;
  for (const ObjectInstance& inst : scene.instances) {
    const Vec3 center = inst.pose * library.at(inst.object_id).mass.gravity_center;
    const double d = (center - p.grasp.translation).squaredNorm();
    if (!best || d < best_d) {
      best = &inst;
      best_d = d;
    }
  }
  if (!best) throw UnknownObjectId("<any>");
  return *best;
}

}  // namespace

EvalReport evaluate_ap(std::span<const PredictedGrasp> predictions, const SceneLayout& scene,
                       const ObjectLibrary& library, std::span<const double> thresholds,
                       const EvalOptions& options) {
  for (const ObjectInstance& inst : scene.instances) {
    if (!library.contains(inst.object_id)) throw UnknownObjectId(inst.object_id);
  }
  for (const PredictedGrasp& p : predictions) {
    if (!std::isfinite(p.predicted_score)) {
      throw InputError("SchemaError", "non-finite predicted score");
    }
    if (p.object_id) associate(p, scene, library);
  }

  const auto survivors = grasp_nms(predictions, options.nms_translation, options.nms_rotation);
  const SpatialIndex cloud(scene.scene_cloud, {});
  std::vector<const PredictedGrasp*> free;
  for (const PredictedGrasp& p : survivors) {
    if (!gripper_collides(cloud, p.grasp, options.gripper)) free.push_back(&p);
  }

  const std::size_t n = std::min(free.size(), options.top_k);
  std::vector<double> scores;
  scores.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const PredictedGrasp& p = *free[i];
    const ObjectInstance& inst = associate(p, scene, library);
    scores.push_back(true_grasp_score(p.grasp, inst, library.at(inst.object_id), options));
  }

  EvalReport report = ap_from_scores(scores, thresholds, options.top_k);
  report.n_predictions = predictions.size();
  report.n_filtered_nms = predictions.size() - survivors.size();
  report.n_filtered_collision = survivors.size() - free.size();
  return report;
}

std::vector<Vec3> build_scene_cloud(const SceneLayout& scene, const ObjectLibrary& library,
                                    double table_spacing, double table_margin) {
  std::vector<Vec3> cloud;
  Eigen::AlignedBox3d footprint;
  for (const ObjectInstance& inst : scene.instances) {
    const auto it = library.find(inst.object_id);
    if (it == library.end()) throw UnknownObjectId(inst.object_id);
    for (const Vec3& p : it->second.mesh->surface_points().points) {
      cloud.push_back(inst.pose * p);
      footprint.extend(cloud.back());
    }
  }
  if (footprint.isEmpty() || !(table_spacing > 0.0)) return cloud;
  const double x0 = footprint.min().x() - table_margin;
  const double y0 = footprint.min().y() - table_margin;
  const auto nx = static_cast<std::size_t>(
      std::floor((footprint.sizes().x() + 2 * table_margin) / table_spacing)) + 1;
  const auto ny = static_cast<std::size_t>(
      std::floor((footprint.sizes().y() + 2 * table_margin) / table_spacing)) + 1;
  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t j = 0; j < ny; ++j) {
      cloud.emplace_back(x0 + static_cast<double>(i) * table_spacing,
                         y0 + static_cast<double>(j) * table_spacing, scene.table_height);
    }
  }
  return cloud;
}

SceneLayout compose_scene(const std::vector<std::string>& object_ids,
                          const ObjectLibrary& library, double table_height, std::uint64_t seed) {
  SceneLayout scene;
  scene.table_height = table_height;
  std::mt19937_64 rng(seed);
  const auto uniform = [&rng]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };

  double cell = 0.0;
  for (const std::string& id : object_ids) {
    const auto it = library.find(id);
    if (it == library.end()) throw UnknownObjectId(id);
    const auto box = it->second.mesh->bounds();
    cell = std::max(cell, box.sizes().head<2>().norm());
  }
  cell += 0.02;
  const auto columns = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(object_ids.size()))));

  for (std::size_t i = 0; i < object_ids.size(); ++i) {
    const ObjectModel& model = library.at(object_ids[i]);
    const double yaw = 2.0 * std::numbers::pi * uniform();
    const Mat3 rotation = Eigen::AngleAxisd(yaw, Vec3::UnitZ()).toRotationMatrix();
    double min_z = std::numeric_limits<double>::infinity();
    Vec3 center = Vec3::Zero();
    for (const Vec3& v : model.mesh->vertices()) {
      const Vec3 r = rotation * v;
      min_z = std::min(min_z, r.z());
      center += r;
    }
    center /= static_cast<double>(model.mesh->vertices().size());
    const double gx = static_cast<double>(i % columns) * cell + (uniform() - 0.5) * 0.01;
    const double gy = static_cast<double>(i / columns) * cell + (uniform() - 0.5) * 0.01;
    RigidTransform pose = RigidTransform::Identity();
    pose.linear() = rotation;
    pose.translation() = Vec3(gx - center.x(), gy - center.y(), table_height - min_z);
    scene.instances.push_back({object_ids[i], pose});
  }
  scene.scene_cloud = build_scene_cloud(scene, library);
  return scene;
}

}  // namespace graspmetric
