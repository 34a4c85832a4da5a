#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "phm/rul.hpp"
#include "test_util.hpp"

using namespace phm;

namespace {

// Threshold assessor on k1 only: faulty once k1 crosses theta.
Assessor k1_threshold(double theta) {
  return [theta](const FaultVector& k) {
    return k[0] < theta ? HealthLabel::healthy : HealthLabel::faulty;
  };
}

DamageModel diag_model(double f, double dt) {
  DamageModel m;
  m.influence = Mat::Zero(kNumFaults, kNumFaults);
  m.influence(0, 0) = f;
  m.noise_sigma = Vec::Zero(kNumFaults);
  m.dt = dt;
  m.growth_floor = 0.0;
  return m;
}

}  // namespace

TEST_CASE("initially faulty state has zero RUL") {
  DamageModel m = diag_model(1e-3, 10.0);
  FaultVector k = FaultVector::nominal();
  k[0] = 0.5;
  Propagation p = propagate_once(k, m, k1_threshold(0.2));
  CHECK(p.rul == 0.0);
  CHECK_FALSE(p.censored);
}

TEST_CASE("diagonal growth matches the analytic crossing time") {
  // dk1/dt = f k1 with k1(0) = 0.1 crosses theta at t = ln(theta/0.1)/f
  const double f = 1e-3, theta = 0.4, dt = 10.0;
  DamageModel m = diag_model(f, dt);
  FaultVector k = FaultVector::nominal();
  k[0] = 0.1;
  Propagation p = propagate_once(k, m, k1_threshold(theta));
  double t_exact = std::log(theta / 0.1) / f;
  CHECK(std::abs(p.rul - t_exact) <= 2.0 * dt);
  CHECK_FALSE(p.censored);
}

TEST_CASE("halving the step halves the discretization error band") {
  const double f = 1e-3, theta = 0.4;
  FaultVector k = FaultVector::nominal();
  k[0] = 0.1;
  double t_exact = std::log(theta / 0.1) / f;
  Propagation coarse = propagate_once(k, diag_model(f, 10.0), k1_threshold(theta));
  Propagation fine = propagate_once(k, diag_model(f, 5.0), k1_threshold(theta));
  CHECK(std::abs(fine.rul - t_exact) <= std::abs(coarse.rul - t_exact) + 5.0);
  CHECK(std::abs(fine.rul - t_exact) < 2.0 * 10.0);
}

TEST_CASE("zero influence and zero floor never degrade (censored)") {
  DamageModel m = diag_model(0.0, 10.0);
  FaultVector k = FaultVector::nominal();
  k[0] = 0.1;
  Propagation p = propagate_once(k, m, k1_threshold(0.4));
  CHECK(p.censored);
  CHECK(p.rul == m.cap);
}

TEST_CASE("trajectory components stay inside the unit cube") {
  DamageModel m = diag_model(5e-3, 10.0);
  m.noise_sigma = Vec::Constant(kNumFaults, 2e-3);
  FaultVector k = FaultVector::nominal();
  k[0] = 0.2;
  Propagation p = propagate_once(k, m, k1_threshold(0.9), 123u, true);
  REQUIRE(!p.trajectory.empty());
  for (const auto& state : p.trajectory)
    for (int i = 0; i < kNumFaults; ++i) {
      CHECK(state[i] >= 0.0);
      CHECK(state[i] <= 1.0);
    }
}

TEST_CASE("noise-free quantiles coincide") {
  DamageModel m = diag_model(1e-3, 10.0);
  FaultVector k = FaultVector::nominal();
  k[0] = 0.1;
  RulEstimate est = estimate_rul_quantiles(k, m, k1_threshold(0.4), 30, 9);
  CHECK(est.rul_5 == doctest::Approx(est.rul_50));
  CHECK(est.rul_95 == doctest::Approx(est.rul_50));
  CHECK(est.rul_5 <= est.rul_50);
  CHECK(est.rul_50 <= est.rul_95);
}

TEST_CASE("5-95 band covers fresh noisy runs about 90% of the time") {
  DamageModel m = diag_model(2e-3, 10.0);
  m.noise_sigma = Vec::Zero(kNumFaults);
  m.noise_sigma[0] = 1e-3;
  FaultVector k = FaultVector::nominal();
  k[0] = 0.1;
  Assessor a = k1_threshold(0.5);
  RulEstimate est = estimate_rul_quantiles(k, m, a, 200, 31);
  REQUIRE(est.sample_count == 200);
  CHECK(est.rul_5 < est.rul_50);
  CHECK(est.rul_50 < est.rul_95);

  int covered = 0;
  const int n_fresh = 200;
  for (int i = 0; i < n_fresh; ++i) {
    Propagation p =
        propagate_once(k, m, a, substream_seed(777, "fresh-" + std::to_string(i)));
    if (p.rul >= est.rul_5 && p.rul <= est.rul_95) ++covered;
  }
  double cov = double(covered) / double(n_fresh);
  CHECK(cov >= 0.85);
  CHECK(cov <= 0.95);
}

TEST_CASE("disturbance direction is radial and unit length") {
  FaultVector k0 = FaultVector::nominal();
  FaultVector k = k0;
  k[0] = 0.3;
  Vec d = disturbance_direction(k, k0);
  CHECK(d.norm() == doctest::Approx(1.0));
  CHECK(d[0] == doctest::Approx(1.0));
  // exact nominal falls back to a uniform positive direction
  Vec d0 = disturbance_direction(k0, k0);
  CHECK(d0.norm() == doctest::Approx(1.0));
  CHECK(d0[6] == 0.0);  // phase carries no damage
  for (int i = 0; i < kNumFaults; ++i)
    if (i != 6) CHECK(d0[i] > 0.0);
}

TEST_CASE("calibrated disturbance reproduces the target RUL") {
  DamageModel m = diag_model(2e-3, 10.0);
  FaultVector k = FaultVector::nominal();
  k[0] = 0.1;
  Assessor a = k1_threshold(0.5);
  Vec dir = disturbance_direction(k, m.k0);

  Propagation base = propagate_once(k, m, a);
  // ask for a noticeably shorter life than the undisturbed run gives
  double target = 0.7 * base.rul;
  double delta = calibrate_delta(k, m, a, target, dir);
  CHECK(delta > 0.0);

  FaultVector kd = k;
  for (int i = 0; i < kNumFaults; ++i)
    kd[i] = std::clamp(k[i] + delta * dir[i], 0.0, 1.0);
  Propagation p = propagate_once(kd, m, a);
  CHECK(std::abs(p.rul - target) <= 2.0 * m.dt);

  // a zero disturbance must reproduce the undisturbed life
  double d0 = calibrate_delta(k, m, a, base.rul, dir);
  FaultVector k_same = k;
  for (int i = 0; i < kNumFaults; ++i)
    k_same[i] = std::clamp(k[i] + d0 * dir[i], 0.0, 1.0);
  CHECK(std::abs(propagate_once(k_same, m, a).rul - base.rul) <= 2.0 * m.dt);

  // larger disturbances shorten the life monotonically
  double prev = base.rul;
  for (double dd : {0.05, 0.1, 0.2}) {
    FaultVector kk = k;
    for (int i = 0; i < kNumFaults; ++i)
      kk[i] = std::clamp(k[i] + dd * dir[i], 0.0, 1.0);
    double r = propagate_once(kk, m, a).rul;
    CHECK(r <= prev + 1e-9);
    prev = r;
  }
}

TEST_CASE("coupled growth accelerates degradation") {
  DamageModel m = diag_model(1e-3, 10.0);
  DamageModel mc = m;
  mc.influence(0, 1) = 1e-3;  // k2 feeds k1
  FaultVector k = FaultVector::nominal();
  k[0] = 0.1;
  k[1] = 0.3;
  Assessor a = k1_threshold(0.5);
  CHECK(propagate_once(k, mc, a).rul < propagate_once(k, m, a).rul);
}

TEST_CASE("rul metrics") {
  RulEstimate est, ref;
  est.rul_50 = 120.0;
  ref.rul_5 = 80.0;
  ref.rul_50 = 100.0;
  ref.rul_95 = 130.0;
  auto [err, band] = rul_metrics(est, ref);
  CHECK(err == doctest::Approx(0.2));
  CHECK(band == doctest::Approx(0.5));

  RulEstimate bad;
  bad.rul_50 = 0.0;
  CHECK_THROWS_AS(rul_metrics(est, bad), ValidationError);
}

TEST_CASE("model validation") {
  DamageModel m = DamageModel::defaults();
  CHECK_NOTHROW(m.validate());
  m.dt = 0.0;
  CHECK_THROWS_AS(m.validate(), ValidationError);
}
