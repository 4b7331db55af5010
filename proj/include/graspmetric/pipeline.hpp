#pragma once

#include <string>
#include <vector>

#include "graspmetric/candidates.hpp"
#include "graspmetric/config.hpp"
#include "graspmetric/mesh.hpp"
#include "graspmetric/metrics.hpp"
#include "graspmetric/scene_eval.hpp"

namespace graspmetric {

MeshBuildOptions mesh_options(const Config& config);

// Attaches densified surface samples drawn with the config's seed.
TriangleMesh prepare_mesh(const TriangleMesh& mesh, const Config& config);

// Raw (un-normalized) breakdown per candidate, computed in parallel.
std::vector<ScoreBreakdown> score_candidates(std::span<const GraspCandidate> candidates,
                                             const SpatialIndex& index,
                                             const Vec3& gravity_center,
                                             const MetricSettings& settings, unsigned workers);

struct LabelResult {
  MassProperties mass;
  CandidateGrid grid;
  EnumerationStats stats;
  std::vector<GraspCandidate> candidates;
  std::vector<ScoreBreakdown> scores;  // normalized, aligned with candidates
};

// Candidate generation, force closure, physical metrics and per-object
// normalization for one prepared mesh.
LabelResult label_mesh(const TriangleMesh& prepared, const Config& config);

// Scoring context for evaluation; normalization bounds come from labeling the
// object with the same config.
ObjectModel make_object_model(const TriangleMesh& prepared, const Config& config);

}  // namespace graspmetric
