#include "phm/sim.hpp"

#include <cmath>
#include <complex>

namespace phm {

namespace {
constexpr double kTwoPi = 2.0 * M_PI;

double wrap_pm_pi(double x) {
  x = std::fmod(x, kTwoPi);
  if (x > M_PI) x -= kTwoPi;
  if (x < -M_PI) x += kTwoPi;
  return x;
}

// Rotor-angle shape functions for the electrical fault modes.
// Short circuit of phase i reduces the local resistance and back-EMF inside
// a raised-cosine window of width 2*pi/3 centered on the phase conduction
// sector of the *electrical* angle (pole_pairs electrical revs per turn, so
// all three phases conduct within a fraction of a mechanical revolution);
// static eccentricity modulates the back-EMF once per mechanical revolution.
struct Modulation {
  double r_scale;   // applies to R
  double kv_scale;  // applies to kv
};

Modulation shape_modulation(const FaultVector& k, double theta,
                            const ActuatorParams& p) {
  double s = 1.0;
  double theta_e = p.pole_pairs * theta;
  static constexpr double centers[3] = {0.0, kTwoPi / 3.0, 2.0 * kTwoPi / 3.0};
  for (int i = 0; i < 3; ++i) {
    double d = wrap_pm_pi(theta_e - centers[i]);
    if (std::abs(d) < M_PI / 3.0) s -= k[2 + i] * 0.5 * (1.0 + std::cos(3.0 * d));
  }
  double phase = kTwoPi * (k[6] - 0.5);
  double ecc = 1.0 - k[5] * p.ecc_gain * std::cos(theta - phase);
  return {s, s * ecc};
}

struct State {
  double theta = 0.0;  // motor angle [rad]
  double omega = 0.0;  // motor speed [rad/s]
  double current = 0.0;
};

struct Derivative {
  double dtheta, domega, dcurrent;
};

template <bool Modulated>
Derivative dynamics(const State& x, double cmd_pos, double user_pos,
                    double user_raw, const FaultVector& k,
                    const ActuatorParams& p) {
  double r_eff = p.resistance;
  double kv_eff = p.kv;
  if constexpr (Modulated) {
    Modulation m = shape_modulation(k, x.theta, p);
    r_eff *= m.r_scale;
    kv_eff *= m.kv_scale;
  }

  double kp = p.kp_nom * (0.5 + k[7]);
  double i_ref = std::clamp(kp * (cmd_pos - user_pos), -p.i_sat, p.i_sat);
  double v = std::clamp(p.current_loop_gain * (i_ref - x.current), -p.v_supply,
                        p.v_supply);

  double t_motor = kv_eff * x.current;
  double t_fric = p.friction_nom * (1.0 + 2.0 * k[0]) *
                  std::tanh(x.omega / p.friction_omega_ref);
  double t_stop = 0.0;
  if (user_raw > p.endstop)
    t_stop = p.endstop_stiffness * (user_raw - p.endstop) / p.gear_ratio;
  else if (user_raw < -p.endstop)
    t_stop = p.endstop_stiffness * (user_raw + p.endstop) / p.gear_ratio;

  Derivative d;
  d.dtheta = x.omega;
  d.domega = (t_motor - t_fric - p.viscous * x.omega - t_stop -
              p.load_torque / p.gear_ratio) /
             p.inertia;
  d.dcurrent = (v - kv_eff * x.omega - r_eff * x.current) / p.inductance;
  return d;
}

// Exact first-order low-pass step with linearly interpolated input.
struct FohLowpass {
  double ea, w0, w1;
  FohLowpass(double corner_hz, double h) {
    double a = kTwoPi * corner_hz * h;
    ea = std::exp(-a);
    w1 = 1.0 - (1.0 - ea) / a;
    w0 = (1.0 - ea) / a - ea;
  }
  double step(double x, double u_prev, double u) const {
    return ea * x + w0 * u_prev + w1 * u;
  }
};

template <bool Modulated>
SimTrace run_sim(const FaultVector& fault, const CommandProfile& cmd,
                 const ActuatorParams& p, bool truth,
                 std::optional<std::uint64_t> noise_seed) {
  fault.validate();
  p.validate();
  require(cmd.samples() >= 2 && cmd.sample_rate > 0,
          "command profile malformed");

  const Index n_e = cmd.samples();
  const int sub = p.substeps;
  const double dt = cmd.dt();
  const double h = dt / sub;

  State x;
  double user_m = 0.0;  // backlash play state, motor frame
  const double half_play = p.backlash_nom * (1.0 + 99.0 * fault[1]) / 2.0;

  FohLowpass lp(p.envelope_cutoff, h);
  double f1 = 0.0, f2 = 0.0;  // cascaded filter states
  double meas_prev = 0.0;

  std::optional<Rng> rng;
  if (truth && noise_seed) rng.emplace(*noise_seed);

  // overall degradation severity, 0 at nominal (phase k7 carries none)
  double sev = 0.0;
  for (int i = 0; i < 6; ++i) sev += fault[i] * fault[i];
  sev += 4.0 * (fault[7] - 0.5) * (fault[7] - 0.5);
  sev = std::min(std::sqrt(sev), 1.0);

  SimTrace out;
  out.t = Vec::LinSpaced(n_e, 0.0, cmd.duration);
  out.envelope = Vec::Zero(n_e);
  out.user_pos = Vec::Zero(n_e);

  auto measure = [&](double current, double theta) {
    double m = current;
    if (truth) {
      m *= 1.0 + p.ripple_amp * std::cos(6.0 * p.pole_pairs * theta);
      if (rng) m += p.noise_sigma * rng->gaussian();
    }
    return std::abs(m);
  };

  out.envelope[0] = 0.0;
  out.user_pos[0] = 0.0;
  meas_prev = measure(0.0, 0.0);

  for (Index n = 0; n + 1 < n_e; ++n) {
    const double c0 = cmd.position[n];
    const double c1 = cmd.position[n + 1];
    for (int s = 0; s < sub; ++s) {
      // command linearly interpolated inside the sample interval
      auto cmd_at = [&](double frac) {
        double f = (s + frac) / sub;
        return c0 + (c1 - c0) * f;
      };
      double user_raw = user_m / p.gear_ratio;
      double user = std::clamp(user_raw, -p.endstop, p.endstop);

      auto f = [&](const State& st, double frac) {
        return dynamics<Modulated>(st, cmd_at(frac), user, user_raw, fault, p);
      };
      Derivative k1 = f(x, 0.0);
      State x2{x.theta + 0.5 * h * k1.dtheta, x.omega + 0.5 * h * k1.domega,
               x.current + 0.5 * h * k1.dcurrent};
      Derivative k2 = f(x2, 0.5);
      State x3{x.theta + 0.5 * h * k2.dtheta, x.omega + 0.5 * h * k2.domega,
               x.current + 0.5 * h * k2.dcurrent};
      Derivative k3 = f(x3, 0.5);
      State x4{x.theta + h * k3.dtheta, x.omega + h * k3.domega,
               x.current + h * k3.dcurrent};
      Derivative k4 = f(x4, 1.0);
      x.theta += h / 6.0 * (k1.dtheta + 2 * k2.dtheta + 2 * k3.dtheta + k4.dtheta);
      x.omega += h / 6.0 * (k1.domega + 2 * k2.domega + 2 * k3.domega + k4.domega);
      x.current +=
          h / 6.0 * (k1.dcurrent + 2 * k2.dcurrent + 2 * k3.dcurrent + k4.dcurrent);

      // backlash play: output held until the motor takes up the free travel
      user_m = std::clamp(user_m, x.theta - half_play, x.theta + half_play);

      double meas = measure(x.current, x.theta);
      f1 = lp.step(f1, meas_prev, meas);
      // second stage driven by the first; ZOH on the stage-1 output
      f2 = lp.step(f2, f1, f1);
      meas_prev = meas;
    }
    double env = f2;
    if (rng && p.noise_mult > 0.0)
      env = std::max(0.0, env * (1.0 + p.noise_mult * sev * rng->gaussian()));
    double user = std::clamp(user_m / p.gear_ratio, -p.endstop, p.endstop);
    if (!std::isfinite(env) || !std::isfinite(x.theta) ||
        !std::isfinite(x.omega) || !std::isfinite(x.current))
      throw NumericalError("simulation diverged at t = " +
                           std::to_string(out.t[n + 1]) + " s");
    out.envelope[n + 1] = env;
    out.user_pos[n + 1] = user;
  }
  return out;
}

}  // namespace

void ActuatorParams::validate() const {
  auto pos = [](double v, const char* name) {
    require(std::isfinite(v) && v > 0.0, std::string("ActuatorParams.") + name +
                                             " must be positive and finite");
  };
  pos(resistance, "resistance");
  pos(inductance, "inductance");
  pos(kv, "kv");
  pos(inertia, "inertia");
  pos(friction_nom, "friction_nom");
  pos(viscous, "viscous");
  pos(gear_ratio, "gear_ratio");
  pos(endstop, "endstop");
  pos(kp_nom, "kp_nom");
  pos(i_sat, "i_sat");
  pos(v_supply, "v_supply");
  pos(current_loop_gain, "current_loop_gain");
  pos(friction_omega_ref, "friction_omega_ref");
  pos(pole_pairs, "pole_pairs");
  pos(envelope_cutoff, "envelope_cutoff");
  require(backlash_nom >= 0.0, "backlash must be non-negative");
  require(substeps >= 1, "substeps must be >= 1");
  require(noise_mult >= 0.0, "noise_mult must be non-negative");
  require(noise_sigma >= 0.0 && ripple_amp >= 0.0,
          "noise/ripple magnitudes must be non-negative");
}

CommandProfile chirp_command(double duration, double amplitude, double f_start,
                             double f_end, double sample_rate) {
  require(std::isfinite(duration) && duration > 0.0, "duration must be > 0");
  require(std::isfinite(amplitude) && amplitude > 0.0, "amplitude must be > 0");
  require(std::isfinite(sample_rate) && sample_rate > 0.0,
          "sample rate must be > 0");
  require(std::isfinite(f_start) && std::isfinite(f_end) && f_start >= 0.0 &&
              f_end >= f_start,
          "need f_end >= f_start >= 0");
  require(sample_rate > 2.0 * f_end, "sample rate must exceed 2*f_end");

  CommandProfile c;
  c.duration = duration;
  c.sample_rate = sample_rate;
  Index n = Index(std::llround(duration * sample_rate)) + 1;
  c.position = Vec(n);
  for (Index i = 0; i < n; ++i) {
    double t = double(i) / sample_rate;
    double phase = kTwoPi * (f_start * t +
                             (f_end - f_start) * t * t / (2.0 * duration));
    c.position[i] = amplitude * std::sin(phase);
  }
  return c;
}

CommandProfile sine_command(double duration, double amplitude, double freq,
                            double sample_rate) {
  require(std::isfinite(freq) && freq > 0.0, "frequency must be > 0");
  return chirp_command(duration, amplitude, freq, freq, sample_rate);
}

SimTrace simulate_trace(const FaultVector& fault, const CommandProfile& cmd,
                        const ActuatorParams& params, Tier tier,
                        std::optional<std::uint64_t> noise_seed) {
  return run_sim<true>(fault, cmd, params, tier == Tier::truth, noise_seed);
}

SimTrace simulate_dc_reference(const FaultVector& fault,
                               const CommandProfile& cmd,
                               const ActuatorParams& params) {
  return run_sim<false>(fault, cmd, params, false, {});
}

SignalSnapshot simulate_response(const FaultVector& fault,
                                 const CommandProfile& cmd,
                                 const ActuatorParams& params, Tier tier,
                                 std::optional<std::uint64_t> noise_seed) {
  SimTrace tr = simulate_trace(fault, cmd, params, tier, noise_seed);
  return {std::move(tr.t), std::move(tr.envelope)};
}

BodeData frequency_response(const FaultVector& fault,
                            const ActuatorParams& params, const Vec& freqs,
                            double probe_amplitude) {
  require(freqs.size() >= 1, "empty frequency grid");
  for (Index i = 0; i < freqs.size(); ++i) {
    require(freqs[i] > 0.0, "probe frequencies must be positive");
    if (i) require(freqs[i] > freqs[i - 1], "frequencies must be increasing");
  }
  require(probe_amplitude > 0.0, "probe amplitude must be > 0");

  BodeData bode;
  bode.freq = freqs;
  bode.gain_db = Vec(freqs.size());
  bode.phase_deg = Vec(freqs.size());

  constexpr int kSettleCycles = 3;
  constexpr int kMeasureCycles = 2;

  double prev_phase = 0.0;
  for (Index i = 0; i < freqs.size(); ++i) {
    double f = freqs[i];
    // >= 40 samples per cycle, 2 kHz floor so the internal step stays
    // in the solver's stable region
    double fs = std::max(2000.0, 40.0 * f);
    int cycles = kSettleCycles + kMeasureCycles;
    double duration = cycles / f;
    CommandProfile cmd = sine_command(duration, probe_amplitude, f, fs);
    SimTrace tr = simulate_trace(fault, cmd, params, Tier::lf, {});

    // Fourier projection at the probe frequency over the last whole cycles
    Index n_meas = Index(std::llround(kMeasureCycles / f * fs));
    Index start = tr.t.size() - n_meas;
    std::complex<double> ay(0, 0), ac(0, 0);
    for (Index n = start; n < tr.t.size(); ++n) {
      std::complex<double> e = std::polar(1.0, -kTwoPi * f * tr.t[n]);
      ay += tr.user_pos[n] * e;
      ac += cmd.position[n] * e;
    }
    double gain_db, phase;
    if (std::abs(ay) == 0.0 || std::abs(ac) == 0.0) {
      gain_db = kGainFloorDb;
      phase = prev_phase;
    } else {
      std::complex<double> H = ay / ac;
      gain_db = std::max(20.0 * std::log10(std::abs(H)), kGainFloorDb);
      phase = std::arg(H) * 180.0 / M_PI;
      while (phase - prev_phase > 180.0) phase -= 360.0;
      while (phase - prev_phase < -180.0) phase += 360.0;
    }
    bode.gain_db[i] = gain_db;
    bode.phase_deg[i] = phase;
    prev_phase = phase;
  }
  return bode;
}

}  // namespace phm
