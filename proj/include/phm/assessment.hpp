#pragma once

#include "phm/sim.hpp"

namespace phm {

/// Stability/performance figures extracted from a closed-loop sweep.
struct MarginsRecord {
  double gain_margin_db = std::numeric_limits<double>::infinity();
  double phase_margin_deg = std::numeric_limits<double>::infinity();
  double cutoff_hz = 0.0;
  bool cutoff_in_grid = false;  // false: no -3 dB crossing, grid max reported
  HealthLabel label = HealthLabel::faulty;
};

struct AssessmentOptions {
  Index grid_points = 20;
  double f_min = 0.2;   // Hz, log-spaced grid
  double f_max = 50.0;
  double probe_amplitude = 5e-3;  // rad
};

Vec assessment_grid(const AssessmentOptions& opts);

/// Extracts cutoff and open-loop-equivalent margins from closed-loop Bode
/// data (G = H / (1 - H); frequencies with |1 - H| < 1e-3 are excluded).
MarginsRecord margins_from_bode(const BodeData& bode, const Requirements& reqs);

/// Full model-based assessment: sweeps the lf model and compares the three
/// margins to the requirements.
MarginsRecord assess_full(const FaultVector& fault, const ActuatorParams& params,
                          const Requirements& reqs,
                          const AssessmentOptions& opts = {});

}  // namespace phm
