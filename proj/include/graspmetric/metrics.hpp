#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "graspmetric/force_closure.hpp"
#include "graspmetric/gripper.hpp"
#include "graspmetric/spatial_index.hpp"

namespace graspmetric {

struct MetricWeights {
  double lambda_t = 0.7;
  double lambda_f = 0.2;
  double lambda_g = 0.05;
  double lambda_c = 0.05;

  // All >= 0 and summing to 1 within 1e-9; throws ConfigError otherwise.
  void validate() const;
};

struct ScoreBreakdown {
  double s_t = 0.0;
  double s_f1 = 0.0;
  double s_f2 = 0.0;
  double s_f = 0.0;
  double s_g_raw = 0.0;  // meters
  double s_g = 0.0;
  double s_c_raw = 0.0;  // meters
  double s_c = 0.0;
  double s_hybrid = 0.0;
};

struct FlatnessScore {
  double s_f1 = 0.0;
  double s_f2 = 0.0;
  double s_f = 0.0;
};

// s_f1: per contact, mean cosine between the contact normal and its k nearest
// sample normals, clamped to [0, 1], then averaged over both contacts.
// s_f2: mean over both contacts of |cos(v_a, v_q)|.
FlatnessScore flatness_score(const ContactFrame& frame, const SpatialIndex& index, std::size_t k);

// Distance from the gravity center to the line through both contacts.
double gravity_score(const ContactFrame& frame, const Vec3& gravity_center);

// min(|p_el - p_cl|, |p_er - p_cr|)
double collision_score(const ContactFrame& frame);

// Min/max of the raw gravity and collision columns used for normalization.
struct NormalizationBounds {
  double g_min = 0.0;
  double g_max = 0.0;
  double c_min = 0.0;
  double c_max = 0.0;
};

NormalizationBounds bounds_of(std::span<const ScoreBreakdown> breakdowns);

// lambda_t*s_t + lambda_f*s_f + lambda_g*s_g + lambda_c*s_c, kept in [0, 1].
double combine(const ScoreBreakdown& b, const MetricWeights& weights);

// s_g = 1 - norm(s_g_raw), s_c = norm(s_c_raw), s_hybrid = weighted sum.
// Values outside the bounds are clamped; a zero-width range maps to 0.
ScoreBreakdown normalize_one(ScoreBreakdown partial, const NormalizationBounds& bounds,
                             const MetricWeights& weights);

// Min-max normalization over the given candidate set.
std::vector<ScoreBreakdown> normalize_and_combine(std::span<const ScoreBreakdown> breakdowns,
                                                  const MetricWeights& weights);

struct MetricSettings {
  MetricWeights weights;
  FrictionBins bins;
  std::size_t knn_k = 10;
};

// Every raw term for one valid frame; normalized fields are left at 0.
ScoreBreakdown partial_breakdown(const ContactFrame& frame, const SpatialIndex& index,
                                 const Vec3& gravity_center, const MetricSettings& settings);

}  // namespace graspmetric
