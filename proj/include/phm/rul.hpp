#pragma once

#include <functional>

#include "phm/types.hpp"

namespace phm {

using Assessor = std::function<HealthLabel(const FaultVector&)>;

/// Linear damage-growth model dk/dt = F (k - k0) + eps, integrated until the
/// assessment flips to faulty.
struct DamageModel {
  Mat influence;          // F, n_k x n_k [1/hour]
  Vec noise_sigma;        // per-component [1/hour]
  FaultVector k0 = FaultVector::nominal();
  double dt = 10.0;       // integration step [hours]
  double cap = 20000.0;   // RUL cap [hours]
  double growth_floor = 1e-3;  // |dk| floor so k = k0 is not a fixed point

  static DamageModel defaults();
  void validate() const;
};

struct RulEstimate {
  double rul_5 = 0.0, rul_50 = 0.0, rul_95 = 0.0;  // hours
  double delta_5 = 0.0, delta_50 = 0.0, delta_95 = 0.0;  // calibrated offsets
  Index sample_count = 0;
  bool censored = false;  // hit the cap
};

struct Propagation {
  std::vector<FaultVector> trajectory;
  double rul = 0.0;  // hours
  bool censored = false;
  long clamp_events = 0;
};

/// Forward-Euler propagation with the assessor evaluated each step;
/// Euler-Maruyama noise when seeded, deterministic otherwise. Components are
/// clamped to [0,1] per step. An initially faulty state returns rul = 0.
Propagation propagate_once(const FaultVector& k_init, const DamageModel& model,
                           const Assessor& assessor,
                           std::optional<std::uint64_t> noise_seed = {},
                           bool keep_trajectory = false);

/// Monte-Carlo RUL quantiles: n_mc noisy propagations, Gaussian moment fit,
/// 5/50/95% quantiles floored at 0. Censored when more than half the runs
/// hit the cap.
RulEstimate estimate_rul_quantiles(const FaultVector& k_init,
                                   const DamageModel& model,
                                   const Assessor& assessor, Index n_mc,
                                   std::uint64_t seed);

/// Direction used when noise is replaced by a disturbance on the initial
/// fault: radial from k0 through k_init, uniform positive at exact nominal.
Vec disturbance_direction(const FaultVector& k_init, const FaultVector& k0);

/// Bisection for the scalar disturbance delta whose deterministic RUL from
/// k_init + delta*direction matches the target within model.dt.
double calibrate_delta(const FaultVector& k_init, const DamageModel& model,
                       const Assessor& assessor, double target_rul,
                       const Vec& direction);

/// (err_RUL, Delta_RUL): relative median error and relative 90% band width.
std::pair<double, double> rul_metrics(const RulEstimate& est,
                                      const RulEstimate& ref);

}  // namespace phm
