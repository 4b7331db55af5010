#include "graspmetric/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "graspmetric/errors.hpp"

namespace graspmetric {

void MetricWeights::validate() const {
  for (double w : {lambda_t, lambda_f, lambda_g, lambda_c}) {
    if (!(w >= 0.0)) throw ConfigError("metric weights must be >= 0");
  }
  const double sum = lambda_t + lambda_f + lambda_g + lambda_c;
  if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("metric weights must sum to 1");
}

namespace {

double cosine(const Vec3& a, const Vec3& b) { return a.dot(b) / (a.norm() * b.norm()); }

double local_flatness(const Vec3& point, const Vec3& normal, const SpatialIndex& index,
                      std::size_t k) {
  const auto neighbors = index.knn(point, k);
  double sum = 0.0;
  for (const Neighbor& n : neighbors) sum += cosine(normal, n.normal);
  return std::clamp(sum / static_cast<double>(neighbors.size()), 0.0, 1.0);
}

}  // namespace

FlatnessScore flatness_score(const ContactFrame& frame, const SpatialIndex& index, std::size_t k) {
  if (!frame.valid) throw InvalidFrame();
  FlatnessScore score;
  score.s_f1 = 0.5 * (local_flatness(frame.p_cl, frame.v_ql, index, k) +
                      local_flatness(frame.p_cr, frame.v_qr, index, k));
  score.s_f2 = std::min(
      1.0, 0.5 * (std::abs(cosine(frame.v_a, frame.v_ql)) + std::abs(cosine(frame.v_a, frame.v_qr))));
  score.s_f = score.s_f1 * score.s_f2;
  return score;
}

double gravity_score(const ContactFrame& frame, const Vec3& gravity_center) {
  const Vec3 chord = frame.p_cl - frame.p_cr;
  const double length = chord.norm();
  if (length < 1e-12) throw DegenerateContacts();
  return (frame.p_cl - gravity_center).cross(frame.p_cr - gravity_center).norm() / length;
}

double collision_score(const ContactFrame& frame) {
  if (!frame.valid) throw InvalidFrame();
  return std::min((frame.p_el - frame.p_cl).norm(), (frame.p_er - frame.p_cr).norm());
}

NormalizationBounds bounds_of(std::span<const ScoreBreakdown> breakdowns) {
  NormalizationBounds b;
  if (breakdowns.empty()) return b;
  b.g_min = b.g_max = breakdowns.front().s_g_raw;
  b.c_min = b.c_max = breakdowns.front().s_c_raw;
  for (const ScoreBreakdown& s : breakdowns) {
    b.g_min = std::min(b.g_min, s.s_g_raw);
    b.g_max = std::max(b.g_max, s.s_g_raw);
    b.c_min = std::min(b.c_min, s.s_c_raw);
    b.c_max = std::max(b.c_max, s.s_c_raw);
  }
  return b;
}

double combine(const ScoreBreakdown& b, const MetricWeights& w) {
  const double s = w.lambda_t * b.s_t + w.lambda_f * b.s_f + w.lambda_g * b.s_g + w.lambda_c * b.s_c;
  return std::clamp(s, 0.0, 1.0);  // rounding can leave the sum an ulp above 1
}

namespace {
double min_max(double value, double lo, double hi) {
  const double range = hi - lo;
  if (!(range > 0.0)) return 0.0;
  return std::clamp((value - lo) / range, 0.0, 1.0);
}
}  // namespace

ScoreBreakdown normalize_one(ScoreBreakdown partial, const NormalizationBounds& bounds,
                             const MetricWeights& weights) {
  partial.s_g = 1.0 - min_max(partial.s_g_raw, bounds.g_min, bounds.g_max);
  partial.s_c = min_max(partial.s_c_raw, bounds.c_min, bounds.c_max);
  partial.s_hybrid = combine(partial, weights);
  return partial;
}

std::vector<ScoreBreakdown> normalize_and_combine(std::span<const ScoreBreakdown> breakdowns,
                                                  const MetricWeights& weights) {
  const NormalizationBounds bounds = bounds_of(breakdowns);
  std::vector<ScoreBreakdown> out;
  out.reserve(breakdowns.size());
  for (const ScoreBreakdown& b : breakdowns) out.push_back(normalize_one(b, bounds, weights));
  return out;
}

ScoreBreakdown partial_breakdown(const ContactFrame& frame, const SpatialIndex& index,
                                 const Vec3& gravity_center, const MetricSettings& settings) {
  ScoreBreakdown b;
  b.s_t = force_closure_score(frame, settings.bins);
  const FlatnessScore flat = flatness_score(frame, index, settings.knn_k);
  b.s_f1 = flat.s_f1;
  b.s_f2 = flat.s_f2;
  b.s_f = flat.s_f;
  b.s_g_raw = gravity_score(frame, gravity_center);
  b.s_c_raw = collision_score(frame);
  return b;
}

}  // namespace graspmetric
