#include "graspmetric/force_closure.hpp"

#include <algorithm>
#include <cmath>

#include "graspmetric/errors.hpp"

namespace graspmetric {

void FrictionBins::validate() const {
  if (mus.empty()) throw ConfigError("friction bins must not be empty");
  for (std::size_t i = 0; i < mus.size(); ++i) {
    if (!(mus[i] > 0.0) || mus[i] > 1.1 + 1e-12) {
      throw ConfigError("friction coefficients must lie in (0, 1.1]");
    }
    if (i > 0 && !(mus[i] > mus[i - 1])) {
      throw ConfigError("friction coefficients must be strictly increasing");
    }
  }
}

namespace {

double angle_between(const Vec3& a, const Vec3& b) {
  return std::atan2(a.cross(b).norm(), a.dot(b));
}

}  // namespace

bool antipodal_force_closure(const ContactFrame& frame, double mu) {
  if (!frame.valid) throw InvalidFrame();
  const double half_angle = std::atan(mu);
  return angle_between(frame.v_a, -frame.v_ql) <= half_angle &&
         angle_between(-frame.v_a, -frame.v_qr) <= half_angle;
}

double minimal_friction(const ContactFrame& frame, const FrictionBins& bins) {
  if (!frame.valid) throw InvalidFrame();
  // Both cone angles are fixed by the frame; the first bin whose half-angle
  // covers the larger one is the answer.
  for (double mu : bins.mus) {
    if (antipodal_force_closure(frame, mu)) return mu;
  }
  return 0.0;
}

double force_closure_score(const ContactFrame& frame, const FrictionBins& bins) {
  const double mu = minimal_friction(frame, bins);
  if (mu == 0.0) return 0.0;
  const double raw = 1.1 - mu;
  const double snapped = std::round(raw * 10.0) / 10.0;
  return std::abs(raw - snapped) < 1e-9 ? snapped : raw;
}

}  // namespace graspmetric
