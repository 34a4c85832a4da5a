#pragma once

#include "phm/pod.hpp"
#include "phm/som.hpp"

namespace phm {

/// The n_w retained samples of a measured signal plus the digest of the
/// schedule that selected them.
struct CompressedSignal {
  Vec values;
  Digest128 schedule_hash;
};

Digest128 schedule_digest(const SensorSchedule& schedule);

CompressedSignal compress_signal(const Vec& signal,
                                 const SensorSchedule& schedule);

struct GappyResult {
  Vec coefficients;      // alpha, length n_m
  double condition = 0;  // cond(G) estimate from the pivoted factorization
  bool warned_square = false;  // n_m == n_w
};

/// Recovers the first n_m POD coefficients from the compressed samples by
/// least squares on the schedule rows of the modes (Gappy POD). Refuses
/// n_m > n_w (underdetermined) and cond(G) > 1e12 (too many modes for the
/// schedule).
GappyResult reconstruct_coefficients(const CompressedSignal& y_hat,
                                     const PodBasis& basis,
                                     const SensorSchedule& schedule,
                                     Index n_m = -1);

/// NRMSE of reconstructed vs full-signal coefficients, normalized by the
/// range of the full coefficients. Zero range raises ValidationError.
double coefficient_error(const Vec& alpha_gappy, const Vec& alpha_full);

}  // namespace phm
