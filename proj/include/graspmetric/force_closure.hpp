#pragma once

#include <vector>

#include "graspmetric/gripper.hpp"

namespace graspmetric {

// Friction coefficients tried in ascending order.
struct FrictionBins {
  std::vector<double> mus{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};

  // Strictly increasing, every entry in (0, 1.1].
  void validate() const;
};

// Two-contact antipodal test: the closing line must lie inside both friction
// cones, i.e. angle(v_a, -v_ql) <= atan(mu) and angle(-v_a, -v_qr) <= atan(mu).
// Throws InvalidFrame for an invalid frame.
bool antipodal_force_closure(const ContactFrame& frame, double mu);

// Smallest bin coefficient that achieves closure, or 0 if none does.
double minimal_friction(const ContactFrame& frame, const FrictionBins& bins);

// S_t = 1.1 - mu_min (0 when no bin passes), snapped to the 0.1 grid.
double force_closure_score(const ContactFrame& frame, const FrictionBins& bins);

}  // namespace graspmetric
