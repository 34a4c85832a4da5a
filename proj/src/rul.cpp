#include "phm/rul.hpp"

#include <algorithm>

namespace phm {

DamageModel DamageModel::defaults() {
  DamageModel m;
  m.influence = Mat::Zero(kNumFaults, kNumFaults);
  for (int i = 0; i < kNumFaults; ++i)
    if (i != 6) m.influence(i, i) = 1e-4;  // 1/h; k7 (phase) does not grow
  m.influence(1, 0) = 2e-5;  // friction wear drives backlash
  m.influence(2, 5) = 2e-5;  // eccentricity rubs the windings
  m.influence(3, 5) = 2e-5;
  m.influence(4, 5) = 2e-5;
  m.noise_sigma = Vec::Constant(kNumFaults, 5e-5);
  m.noise_sigma[6] = 0.0;
  return m;
}

void DamageModel::validate() const {
  require(dt > 0.0 && cap > 0.0, "damage model: dt and cap must be positive");
  require(influence.rows() == kNumFaults && influence.cols() == kNumFaults,
          "damage model: influence matrix must be 8x8");
  require(influence.allFinite(), "damage model: non-finite influence matrix");
  require(noise_sigma.size() == kNumFaults && noise_sigma.minCoeff() >= 0.0,
          "damage model: bad noise vector");
}

Propagation propagate_once(const FaultVector& k_init, const DamageModel& model,
                           const Assessor& assessor,
                           std::optional<std::uint64_t> noise_seed,
                           bool keep_trajectory) {
  model.validate();
  k_init.validate();

  Propagation out;
  if (keep_trajectory) out.trajectory.push_back(k_init);
  if (assessor(k_init) == HealthLabel::faulty) {
    out.rul = 0.0;
    return out;
  }

  std::optional<Rng> rng;
  if (noise_seed) rng.emplace(*noise_seed);
  const double sqrt_dt = std::sqrt(model.dt);

  FaultVector k = k_init;
  double t = 0.0;
  while (t < model.cap) {
    Vec dk = k.k - model.k0.k;
    for (int i = 0; i < kNumFaults; ++i)
      if (std::abs(dk[i]) < model.growth_floor) dk[i] = model.growth_floor;
    Vec step = model.dt * (model.influence * dk);
    if (rng)
      for (int i = 0; i < kNumFaults; ++i)
        step[i] += sqrt_dt * model.noise_sigma[i] * rng->gaussian();

    for (int i = 0; i < kNumFaults; ++i) {
      double v = k[i] + step[i];
      if (v < 0.0 || v > 1.0) ++out.clamp_events;
      k[i] = std::clamp(v, 0.0, 1.0);
    }
    t += model.dt;
    if (keep_trajectory) out.trajectory.push_back(k);
    if (assessor(k) == HealthLabel::faulty) {
      out.rul = t;
      return out;
    }
  }
  out.rul = model.cap;
  out.censored = true;
  return out;
}

RulEstimate estimate_rul_quantiles(const FaultVector& k_init,
                                   const DamageModel& model,
                                   const Assessor& assessor, Index n_mc,
                                   std::uint64_t seed) {
  require(n_mc >= 30, "estimate_rul_quantiles: need n_mc >= 30");
  std::vector<double> ruls;
  Index censored = 0;
  for (Index i = 0; i < n_mc; ++i) {
    Propagation p = propagate_once(k_init, model, assessor,
                                   substream_seed(seed, "rul-mc", std::uint64_t(i)));
    ruls.push_back(p.rul);
    if (p.censored) ++censored;
  }
  double mean = 0.0;
  for (double r : ruls) mean += r;
  mean /= double(n_mc);
  double var = 0.0;
  for (double r : ruls) var += (r - mean) * (r - mean);
  var /= double(n_mc);
  double sd = std::sqrt(var);

  constexpr double z90 = 1.6448536269514722;  // 95th percentile of N(0,1)
  RulEstimate est;
  est.rul_5 = std::max(mean - z90 * sd, 0.0);
  est.rul_50 = std::max(mean, 0.0);
  est.rul_95 = std::max(mean + z90 * sd, 0.0);
  est.sample_count = n_mc;
  est.censored = censored * 2 > n_mc;
  return est;
}

Vec disturbance_direction(const FaultVector& k_init, const FaultVector& k0) {
  Vec d = k_init.k - k0.k;
  double n = d.norm();
  if (n < 1e-12) {
    d = Vec::Ones(kNumFaults);
    d[6] = 0.0;  // phase carries no damage
    n = d.norm();
  }
  return d / n;
}

namespace {
double deterministic_rul(const FaultVector& k_init, const DamageModel& model,
                         const Assessor& assessor, double delta,
                         const Vec& direction) {
  FaultVector k = k_init;
  for (int i = 0; i < kNumFaults; ++i)
    k[i] = std::clamp(k_init[i] + delta * direction[i], 0.0, 1.0);
  return propagate_once(k, model, assessor).rul;
}
}  // namespace

double calibrate_delta(const FaultVector& k_init, const DamageModel& model,
                       const Assessor& assessor, double target_rul,
                       const Vec& direction) {
  require(direction.size() == kNumFaults, "calibrate_delta: bad direction");
  require(target_rul >= 0.0, "calibrate_delta: negative target");

  auto rul_at = [&](double d) {
    return deterministic_rul(k_init, model, assessor, d, direction);
  };

  double lo = 0.0, hi = 0.1;
  double rul_lo = rul_at(lo);
  if (rul_lo <= target_rul) return 0.0;  // cannot lengthen life with delta >= 0

  double rul_hi = rul_at(hi);
  int grows = 0;
  while (rul_hi > target_rul) {
    hi *= 2.0;
    rul_hi = rul_at(hi);
    if (++grows > 8)
      throw NumericalError("calibrate_delta: bracket failure (response not "
                           "monotone or target unreachable)");
  }

  for (int it = 0; it < 60; ++it) {
    double mid = 0.5 * (lo + hi);
    double r = rul_at(mid);
    if (std::abs(r - target_rul) < model.dt) return mid;
    (r > target_rul ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::pair<double, double> rul_metrics(const RulEstimate& est,
                                      const RulEstimate& ref) {
  require(ref.rul_50 > 0.0, "rul_metrics: zero reference median");
  double err = std::abs(est.rul_50 - ref.rul_50) / ref.rul_50;
  double band = std::abs(ref.rul_95 - ref.rul_5) / ref.rul_50;
  return {err, band};
}

}  // namespace phm
