#pragma once

#include <array>
#include <cmath>
#include <optional>

#include "phm/common.hpp"

namespace phm {

inline constexpr int kNumFaults = 8;

/// Normalized fault intensities, all in [0,1]:
///   k1 dry friction, k2 backlash, k3/k4/k5 phase A/B/C short circuit,
///   k6 rotor eccentricity amplitude, k7 eccentricity phase, k8 gain drift.
/// Nominal condition: k = (0,0,0,0,0,0,0.5,0.5).
struct FaultVector {
  Eigen::Matrix<double, kNumFaults, 1> k =
      (Eigen::Matrix<double, kNumFaults, 1>() << 0, 0, 0, 0, 0, 0, 0.5, 0.5)
          .finished();

  double operator[](int i) const { return k[i]; }
  double& operator[](int i) { return k[i]; }

  void validate() const {
    for (int i = 0; i < kNumFaults; ++i)
      require(std::isfinite(k[i]) && k[i] >= 0.0 && k[i] <= 1.0,
              "fault component k" + std::to_string(i + 1) +
                  " outside [0,1]: " + std::to_string(k[i]));
  }

  static FaultVector nominal() { return FaultVector{}; }
};

enum class Tier { lf, truth };

enum class HealthLabel { healthy, faulty };

/// Physical parameters of the actuator and of the simulation itself.
/// Motor-side quantities unless noted; angles in rad, time in s.
struct ActuatorParams {
  double resistance = 1.0;        // stator resistance R [ohm]
  double inductance = 1e-3;       // stator inductance L [H]
  double kv = 0.05;               // back-EMF / torque coefficient [V s/rad]
  double inertia = 2e-5;          // rotor + reflected load inertia [kg m^2]
  double friction_nom = 0.01;     // nominal dry friction torque [N m]
  double viscous = 2e-3;          // viscous coefficient [N m s/rad]
  double gear_ratio = 100.0;      // motor revs per user rev
  double backlash_nom = 1e-3;     // nominal backlash, motor side [rad]
  double endstop = 0.5;           // user-side endstop at +/- this angle [rad]
  double kp_nom = 500.0;          // proportional gain [A/rad of user error]
  double i_sat = 10.0;            // current saturation [A]
  double v_supply = 28.0;         // supply voltage [V]
  double load_torque = 0.0;       // external user-side load [N m]

  double current_loop_gain = 10.0;  // inner current loop [V/A]
  double friction_omega_ref = 0.05; // tanh regularization speed [rad/s]
  double endstop_stiffness = 100.0; // user-side penalty spring [N m/rad]

  double pole_pairs = 12.0;         // electrical revs per mechanical rev
  double envelope_cutoff = 200.0;   // envelope low-pass corner [Hz]
  int substeps = 10;                // internal solver steps per sample
  double ecc_gain = 0.3;            // eccentricity modulation depth at k6 = 1
  double ripple_amp = 0.02;         // commutation ripple, truth tier
  double noise_sigma = 0.05;        // sensor noise std [A], truth tier
  // Degradation-borne acquisition noise: multiplicative on the sampled
  // envelope, amplitude proportional to the overall fault severity (zero at
  // nominal). Stands in for the broadband vibration/EMI content a damaged
  // unit couples into the HF measurement chain.
  double noise_mult = 0.12;

  void validate() const;
};

/// Commanded position history on a uniform time grid.
struct CommandProfile {
  double duration = 0.0;     // [s]
  double sample_rate = 0.0;  // [Hz]
  Vec position;              // [rad], size duration*sample_rate + 1

  Index samples() const { return position.size(); }
  double dt() const { return 1.0 / sample_rate; }
};

/// Envelope-current output of one simulation run.
struct SignalSnapshot {
  Vec t;  // [s]
  Vec y;  // envelope current [A]
};

/// Closed-loop position frequency response.
struct BodeData {
  Vec freq;       // [Hz], strictly increasing
  Vec gain_db;    // 20 log10 |H|
  Vec phase_deg;  // unwrapped across the grid
};

/// Thresholds the actuator must meet to be labeled healthy.
struct Requirements {
  double min_gain_margin_db = 6.0;
  double min_phase_margin_deg = 35.0;
  double min_cutoff_hz = 4.0;
};

}  // namespace phm
