#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "graspmetric/gripper.hpp"
#include "graspmetric/mesh.hpp"
#include "graspmetric/metrics.hpp"
#include "graspmetric/spatial_index.hpp"

namespace graspmetric {

struct ObjectInstance {
  std::string object_id;
  RigidTransform pose = RigidTransform::Identity();  // object -> world
};

struct SceneLayout {
  std::vector<ObjectInstance> instances;
  double table_height = 0.0;
  std::vector<Vec3> scene_cloud;  // world frame, objects + table
};

struct PredictedGrasp {
  GraspPose grasp;
  double predicted_score = 0.0;
  std::optional<std::string> object_id;
};

// Everything needed to score grasps on one object in its own frame.
struct ObjectModel {
  std::shared_ptr<const TriangleMesh> mesh;
  std::shared_ptr<const SpatialIndex> index;  // over the mesh's surface samples
  MassProperties mass;
  NormalizationBounds bounds;
};

using ObjectLibrary = std::map<std::string, ObjectModel>;

// Rotation angle of r1^T r2, radians.
double rotation_distance(const Mat3& r1, const Mat3& r2);

// Greedy NMS in (score desc, input index asc) order. A grasp is dropped when
// some kept grasp is closer than `trans_thresh` in translation AND
// `rot_thresh` in rotation. Returns kept input indices in selection order.
std::vector<std::size_t> grasp_nms_indices(std::span<const PredictedGrasp> grasps,
                                           double trans_thresh, double rot_thresh);
std::vector<PredictedGrasp> grasp_nms(std::span<const PredictedGrasp> grasps, double trans_thresh,
                                      double rot_thresh);

inline const std::vector<double> kDefaultThresholds{0.0, 0.1, 0.3, 0.5, 0.7, 0.9};

struct EvalOptions {
  double nms_translation = 0.03;
  double nms_rotation = 0.5235987755982988;  // 30 degrees
  std::size_t top_k = 50;
  GripperModel gripper;
  MetricSettings metrics;
};

struct EvalReport {
  std::vector<std::pair<double, double>> ap_at_threshold;  // ascending threshold
  double map_value = 0.0;
  std::size_t n_predictions = 0;
  std::size_t n_filtered_nms = 0;
  std::size_t n_filtered_collision = 0;
  bool empty_after_filtering = false;
  std::vector<double> true_scores;  // evaluated slots, predicted order
};

// AP(tau) = mean over k = 1..top_k of (#true scores >= tau among the first k)
// / k. Slots beyond `true_scores.size()` never count as hits.
EvalReport ap_from_scores(std::span<const double> true_scores, std::span<const double> thresholds,
                          std::size_t top_k);

// Hybrid score of a world-frame grasp on one scene instance; 0 when the
// grasp does not produce a valid contact frame.
double true_grasp_score(const GraspPose& world_grasp, const ObjectInstance& instance,
                        const ObjectModel& model, const EvalOptions& options);

EvalReport evaluate_ap(std::span<const PredictedGrasp> predictions, const SceneLayout& scene,
                       const ObjectLibrary& library, std::span<const double> thresholds,
                       const EvalOptions& options);

// Object surface samples in world frame plus a table grid at table_height
// covering the objects' footprint grown by `table_margin`.
std::vector<Vec3> build_scene_cloud(const SceneLayout& scene, const ObjectLibrary& library,
                                    double table_spacing = 0.005, double table_margin = 0.1);

// Objects resting on the table with random yaw, laid out on a jittered grid.
SceneLayout compose_scene(const std::vector<std::string>& object_ids,
                          const ObjectLibrary& library, double table_height, std::uint64_t seed);

}  // namespace graspmetric
