#pragma once

#include "phm/types.hpp"

namespace phm {

/// Linear chirp position command a*sin(2*pi*(f0 t + (f1-f0) t^2 / (2T))).
CommandProfile chirp_command(double duration, double amplitude, double f_start,
                             double f_end, double sample_rate);

/// Constant-frequency sine command (frequency-response probe).
CommandProfile sine_command(double duration, double amplitude, double freq,
                            double sample_rate);

/// Integrates the closed-loop actuator under the given fault condition and
/// returns the rectified, low-pass-filtered envelope of the motor current.
/// The truth tier adds rotor-angle shape-function modulation, commutation
/// ripple and (when seeded) Gaussian sensor noise; the lf tier applies the
/// same shape-function fault laws on the smooth DC model, with no noise.
SignalSnapshot simulate_response(const FaultVector& fault,
                                 const CommandProfile& cmd,
                                 const ActuatorParams& params, Tier tier,
                                 std::optional<std::uint64_t> noise_seed = {});

/// Full trace of one run: envelope plus the user position needed by the
/// frequency-response analysis.
struct SimTrace {
  Vec t;
  Vec envelope;  // [A]
  Vec user_pos;  // [rad]
};

SimTrace simulate_trace(const FaultVector& fault, const CommandProfile& cmd,
                        const ActuatorParams& params, Tier tier,
                        std::optional<std::uint64_t> noise_seed = {});

/// Pure DC reference model: identical integration with the shape-function
/// modulation code removed. The lf tier at zero shape faults must match this
/// bit for bit.
SimTrace simulate_dc_reference(const FaultVector& fault,
                               const CommandProfile& cmd,
                               const ActuatorParams& params);

inline constexpr double kGainFloorDb = -120.0;  // sentinel for zero response

/// Closed-loop Bode data of the lf model: per frequency, a sinusoidal probe
/// is run to steady state and gain/phase extracted by single-frequency
/// Fourier projection over the last cycles. Phase is unwrapped across the
/// grid. Zero response maps to the kGainFloorDb sentinel.
BodeData frequency_response(const FaultVector& fault,
                            const ActuatorParams& params, const Vec& freqs,
                            double probe_amplitude);

}  // namespace phm
