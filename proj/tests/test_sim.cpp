#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "phm/sim.hpp"
#include "test_util.hpp"

using namespace phm;

namespace {

double mean_abs(const Vec& v) { return v.cwiseAbs().mean(); }

double rms(const Vec& v) { return std::sqrt(v.squaredNorm() / double(v.size())); }

CommandProfile reference_chirp() {
  return chirp_command(0.5, 5e-3, 0.0, 15.0, 20000.0);
}

}  // namespace

TEST_CASE("chirp shape contract") {
  CommandProfile c = reference_chirp();
  CHECK(c.samples() == 10001);
  CHECK(c.position[0] == 0.0);
  CHECK(c.position.cwiseAbs().maxCoeff() <= 5e-3 + 1e-15);
}

TEST_CASE("zero-frequency chirp is the zero command") {
  CommandProfile c = chirp_command(1.0, 2.0, 0.0, 0.0, 100.0);
  CHECK(c.position.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("instantaneous frequency reaches f_end") {
  // spacing of the last two zero crossings ~ half period at the local
  // instantaneous frequency f0 + (f1 - f0) t / T
  CommandProfile c = chirp_command(1.0, 1.0, 2.0, 10.0, 1000.0);
  double t_a = -1.0, t_b = -1.0;
  for (Index i = 1; i < c.samples(); ++i) {
    double p0 = c.position[i - 1], p1 = c.position[i];
    if (p0 == 0.0 || p0 * p1 >= 0.0) continue;
    double t = (double(i - 1) + p0 / (p0 - p1)) * c.dt();
    t_a = t_b;
    t_b = t;
  }
  REQUIRE(t_a > 0.0);
  double mid = 0.5 * (t_a + t_b);
  double f_inst = 2.0 + (10.0 - 2.0) * mid;  // analytic phase derivative
  CHECK(std::abs((t_b - t_a) - 0.5 / f_inst) < 0.03 * (0.5 / f_inst));
}

TEST_CASE("chirp argument validation") {
  CHECK_THROWS_AS(chirp_command(-1.0, 1.0, 0.0, 1.0, 100.0), ValidationError);
  CHECK_THROWS_AS(chirp_command(1.0, 1.0, 5.0, 1.0, 100.0), ValidationError);
  CHECK_THROWS_AS(chirp_command(1.0, 1.0, 0.0, 60.0, 100.0), ValidationError);
}

TEST_CASE("nominal fault, zero command: envelope stays near zero") {
  ActuatorParams p;
  CommandProfile zero = chirp_command(0.3, 1.0, 0.0, 0.0, 20000.0);
  for (Tier tier : {Tier::lf, Tier::truth}) {
    SignalSnapshot s = simulate_response(FaultVector::nominal(), zero, p, tier);
    Index skip = Index(0.05 * zero.sample_rate);  // filter transient
    CHECK(s.y.tail(s.y.size() - skip).cwiseAbs().maxCoeff() < 0.01 * p.i_sat);
  }
}

TEST_CASE("friction fault raises mean envelope current") {
  ActuatorParams p;
  CommandProfile c = reference_chirp();
  FaultVector lo = FaultVector::nominal(), hi = FaultVector::nominal();
  hi[0] = 1.0;
  SignalSnapshot a = simulate_response(lo, c, p, Tier::lf);
  SignalSnapshot b = simulate_response(hi, c, p, Tier::lf);
  CHECK(mean_abs(b.y) > mean_abs(a.y));
}

TEST_CASE("friction monotonicity over five levels") {
  ActuatorParams p;
  CommandProfile c = reference_chirp();
  double prev = -1.0;
  for (double k1 : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    FaultVector k = FaultVector::nominal();
    k[0] = k1;
    double m = mean_abs(simulate_response(k, c, p, Tier::lf).y);
    CHECK(m >= prev);
    prev = m;
  }
}

TEST_CASE("lf vs truth discrepancy is of order one percent at nominal") {
  ActuatorParams p;
  CommandProfile c = reference_chirp();
  SignalSnapshot lf = simulate_response(FaultVector::nominal(), c, p, Tier::lf);
  SignalSnapshot tr =
      simulate_response(FaultVector::nominal(), c, p, Tier::truth, 99u);
  double ratio = rms(Vec(tr.y - lf.y)) / rms(lf.y);
  CHECK(ratio > 0.002);
  CHECK(ratio < 0.02);
}

TEST_CASE("simulation is bit-deterministic") {
  ActuatorParams p;
  CommandProfile c = reference_chirp();
  FaultVector k = FaultVector::nominal();
  k[0] = 0.3;
  k[3] = 0.4;
  SignalSnapshot a = simulate_response(k, c, p, Tier::truth, 7u);
  SignalSnapshot b = simulate_response(k, c, p, Tier::truth, 7u);
  CHECK(phm::testutil::same_bits(a.y, b.y));
  CHECK(phm::testutil::same_bits(a.t, b.t));
}

TEST_CASE("envelope is non-negative up to filter undershoot") {
  ActuatorParams p;
  CommandProfile c = reference_chirp();
  FaultVector k = FaultVector::nominal();
  k[5] = 0.8;
  SignalSnapshot s = simulate_response(k, c, p, Tier::truth, 3u);
  double range = s.y.maxCoeff() - s.y.minCoeff();
  CHECK(s.y.minCoeff() >= -1e-6 * range);
}

TEST_CASE("halving the solver step barely moves the envelope") {
  CommandProfile c = reference_chirp();
  ActuatorParams coarse, fine;
  fine.substeps = 2 * coarse.substeps;
  Vec a = simulate_response(FaultVector::nominal(), c, coarse, Tier::lf).y;
  Vec b = simulate_response(FaultVector::nominal(), c, fine, Tier::lf).y;
  CHECK(rms(Vec(a - b)) < 0.001 * rms(a));
}

TEST_CASE("lf tier equals the DC reference when shape faults are zero") {
  ActuatorParams p;
  CommandProfile c = reference_chirp();
  FaultVector k = FaultVector::nominal();
  k[0] = 0.3;  // friction and gain are not shape-function paths
  k[7] = 0.7;
  SimTrace lf = simulate_trace(k, c, p, Tier::lf);
  SimTrace dc = simulate_dc_reference(k, c, p);
  CHECK(phm::testutil::same_bits(lf.envelope, dc.envelope));
  CHECK(phm::testutil::same_bits(lf.user_pos, dc.user_pos));
}

TEST_CASE("fault vector validation") {
  FaultVector k = FaultVector::nominal();
  CHECK_NOTHROW(k.validate());
  k[2] = 1.5;
  CHECK_THROWS_AS(k.validate(), ValidationError);
}

TEST_CASE("position loop tracks at low frequency") {
  ActuatorParams p;
  Vec f(1);
  f << 0.1;
  BodeData b = frequency_response(FaultVector::nominal(), p, f, 5e-3);
  CHECK(std::abs(b.gain_db[0]) < 0.3);
  // small residual lag from the regularized dry-friction dead zone
  CHECK(std::abs(b.phase_deg[0]) < 10.0);
}

TEST_CASE("gain loss lowers the closed-loop cutoff") {
  ActuatorParams p;
  Vec f(12);
  for (Index i = 0; i < f.size(); ++i)
    f[i] = 2.0 * std::pow(30.0 / 2.0, double(i) / double(f.size() - 1));
  FaultVector weak = FaultVector::nominal();
  weak[7] = 0.0;  // 50% proportional gain
  BodeData nom = frequency_response(FaultVector::nominal(), p, f, 5e-3);
  BodeData deg = frequency_response(weak, p, f, 5e-3);
  auto cutoff = [&](const BodeData& b) {
    for (Index i = 0; i < b.freq.size(); ++i)
      if (b.gain_db[i] < -3.0) return b.freq[i];
    return b.freq[b.freq.size() - 1];
  };
  CHECK(cutoff(deg) < cutoff(nom));
}

TEST_CASE("bode gain matches a direct Fourier-bin oracle") {
  ActuatorParams p;
  FaultVector k = FaultVector::nominal();
  k[0] = 0.4;
  Vec freqs(3);
  freqs << 1.0, 5.0, 10.0;
  BodeData b = frequency_response(k, p, freqs, 5e-3);
  for (Index i = 0; i < freqs.size(); ++i) {
    double f = freqs[i];
    int cycles = 4;
    double settle = 2.0;
    double duration = settle + cycles / f;
    CommandProfile cmd = sine_command(duration, 5e-3, f, 20000.0);
    SimTrace tr = simulate_trace(k, cmd, p, Tier::lf);
    // complex amplitude of the steady-state output over the last full cycles
    Index n = Index(cycles / f * cmd.sample_rate);
    Index start = tr.user_pos.size() - n;
    double re = 0.0, im = 0.0;
    for (Index j = 0; j < n; ++j) {
      double t = double(start + j) * cmd.dt();
      re += tr.user_pos[start + j] * std::cos(2.0 * M_PI * f * t);
      im += tr.user_pos[start + j] * std::sin(2.0 * M_PI * f * t);
    }
    double amp = 2.0 * std::hypot(re, im) / double(n);
    double gain_db = 20.0 * std::log10(amp / 5e-3);
    CHECK(std::abs(gain_db - b.gain_db[i]) < 0.5);
  }
}

TEST_CASE("frequency grid must be increasing and positive") {
  ActuatorParams p;
  Vec bad(2);
  bad << 5.0, 1.0;
  CHECK_THROWS_AS(frequency_response(FaultVector::nominal(), p, bad, 5e-3),
                  ValidationError);
}
