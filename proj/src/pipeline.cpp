#include "graspmetric/pipeline.hpp"

#include <memory>
#include <numbers>

namespace graspmetric {

MeshBuildOptions mesh_options(const Config& config) {
  MeshBuildOptions options;
  options.crease_angle_rad = config.crease_angle_deg * std::numbers::pi / 180.0;
  return options;
}

TriangleMesh prepare_mesh(const TriangleMesh& mesh, const Config& config) {
  return mesh.with_surface_points(sample_surface(mesh, config.sample_density,
                                                 config.min_surface_samples,
                                                 config.max_surface_samples, config.seed));
}

std::vector<ScoreBreakdown> score_candidates(std::span<const GraspCandidate> candidates,
                                             const SpatialIndex& index,
                                             const Vec3& gravity_center,
                                             const MetricSettings& settings, unsigned workers) {
  std::vector<ScoreBreakdown> scores(candidates.size());
  parallel_for(candidates.size(), workers, [&](std::size_t i) {
    scores[i] = partial_breakdown(candidates[i].frame, index, gravity_center, settings);
  });
  return scores;
}

LabelResult label_mesh(const TriangleMesh& prepared, const Config& config) {
  LabelResult result;
  result.mass = mass_properties(prepared);
  result.grid = make_grid(prepared, config.grid, config.gripper);
  result.candidates =
      enumerate_candidates(prepared, result.grid, config.gripper, config.candidates, &result.stats);
  const SpatialIndex index(prepared.surface_points());
  const auto partial = score_candidates(result.candidates, index, result.mass.gravity_center,
                                        config.metrics, config.candidates.workers);
  result.scores = normalize_and_combine(partial, config.metrics.weights);
  return result;
}

ObjectModel make_object_model(const TriangleMesh& prepared, const Config& config) {
  ObjectModel model;
  model.mesh = std::make_shared<const TriangleMesh>(prepared);
  model.index = std::make_shared<const SpatialIndex>(prepared.surface_points());
  model.mass = mass_properties(prepared);
  const LabelResult labels = label_mesh(prepared, config);
  std::vector<ScoreBreakdown> raw = labels.scores;
  model.bounds = bounds_of(raw);
  return model;
}

}  // namespace graspmetric
