#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <complex>

#include "doctest.h"
#include "phm/assessment.hpp"
#include "test_util.hpp"

using namespace phm;

namespace {

// Closed-loop Bode of a synthetic first-order plant H(s) = 1 / (1 + s/w0).
BodeData first_order_bode(double f0, const Vec& freq) {
  BodeData bode;
  bode.freq = freq;
  bode.gain_db.resize(freq.size());
  bode.phase_deg.resize(freq.size());
  for (Index i = 0; i < freq.size(); ++i) {
    std::complex<double> h = 1.0 / std::complex<double>(1.0, freq[i] / f0);
    bode.gain_db[i] = 20.0 * std::log10(std::abs(h));
    bode.phase_deg[i] = std::arg(h) * 180.0 / M_PI;
  }
  return bode;
}

}  // namespace

TEST_CASE("assessment grid is log-spaced and increasing") {
  AssessmentOptions opts;
  opts.grid_points = 10;
  Vec g = assessment_grid(opts);
  REQUIRE(g.size() == 10);
  CHECK(g[0] == doctest::Approx(opts.f_min));
  CHECK(g[9] == doctest::Approx(opts.f_max));
  for (Index i = 1; i < 10; ++i) {
    CHECK(g[i] > g[i - 1]);
    // constant ratio between neighbours
    CHECK(g[i] / g[i - 1] == doctest::Approx(g[1] / g[0]).epsilon(1e-9));
  }
}

TEST_CASE("margins of a synthetic first-order loop") {
  // Dense grid so the -3 dB interpolation error is small.
  Vec freq(300);
  for (Index i = 0; i < 300; ++i)
    freq[i] = 0.2 * std::pow(50.0 / 0.2, double(i) / 299.0);
  const double f0 = 8.0;
  BodeData bode = first_order_bode(f0, freq);
  Requirements reqs;
  MarginsRecord rec = margins_from_bode(bode, reqs);

  CHECK(rec.cutoff_in_grid);
  CHECK(rec.cutoff_hz == doctest::Approx(f0).epsilon(0.02));
  // open loop G = H / (1 - H) = w0 / s: pure integrator, 90 deg phase
  // margin, no 180 deg crossing so the gain margin is unbounded
  CHECK(rec.phase_margin_deg == doctest::Approx(90.0).epsilon(0.05));
  CHECK(std::isinf(rec.gain_margin_db));
  CHECK(rec.label == HealthLabel::healthy);
}

TEST_CASE("slow loop fails the cutoff requirement") {
  Vec freq(200);
  for (Index i = 0; i < 200; ++i)
    freq[i] = 0.2 * std::pow(50.0 / 0.2, double(i) / 199.0);
  BodeData bode = first_order_bode(1.5, freq);  // cutoff below 4 Hz
  MarginsRecord rec = margins_from_bode(bode, Requirements{});
  CHECK(rec.cutoff_hz < 4.0);
  CHECK(rec.label == HealthLabel::faulty);
}

TEST_CASE("nominal actuator is healthy with headroom") {
  ActuatorParams params;
  Requirements reqs;
  MarginsRecord rec = assess_full(FaultVector::nominal(), params, reqs);
  CHECK(rec.label == HealthLabel::healthy);
  // at least 25% headroom on the bandwidth requirement
  CHECK(rec.cutoff_hz >= 1.25 * reqs.min_cutoff_hz);
}

TEST_CASE("severe combined fault is faulty") {
  ActuatorParams params;
  FaultVector k = FaultVector::nominal();
  k[0] = 1.0;  // full dry friction
  k[7] = 0.0;  // full gain drift
  MarginsRecord rec = assess_full(k, params, Requirements{});
  CHECK(rec.label == HealthLabel::faulty);
}

TEST_CASE("gain drift lowers the cutoff") {
  ActuatorParams params;
  FaultVector drifted = FaultVector::nominal();
  drifted[7] = 0.0;
  MarginsRecord nom = assess_full(FaultVector::nominal(), params, Requirements{});
  MarginsRecord deg = assess_full(drifted, params, Requirements{});
  CHECK(deg.cutoff_hz < nom.cutoff_hz);
}

TEST_CASE("label flips exactly once along a degradation ray") {
  ActuatorParams params;
  Requirements reqs;
  int flips = 0;
  HealthLabel prev = HealthLabel::healthy;
  for (int i = 0; i < 10; ++i) {
    double t = double(i) / 9.0;
    FaultVector k = FaultVector::nominal();
    k[0] = t;
    k[7] = 0.5 - 0.5 * t;
    HealthLabel lab = assess_full(k, params, reqs).label;
    if (i == 0) {
      CHECK(lab == HealthLabel::healthy);
    } else if (lab != prev) {
      ++flips;
      CHECK(lab == HealthLabel::faulty);  // never recovers
    }
    prev = lab;
  }
  CHECK(flips == 1);
  CHECK(prev == HealthLabel::faulty);
}
