#pragma once

#include "phm/types.hpp"

namespace phm {

/// POD basis of the centered snapshot matrix Y - y0*1^T.
/// Modes are orthonormal columns ordered by descending eigenvalue; the
/// eigenvalue convention is lambda_i = sigma_i^2 / n_s (mean dispersion of
/// the snapshots along each mode).
struct PodBasis {
  Vec y0;              // reference signal, length n_e
  Mat modes;           // n_e x rank
  Vec eigenvalues;     // descending, >= 0, length rank
  double total_energy = 0.0;  // sum over *all* modes incl. truncated tail
  Index n_m = 0;       // retained mode count for downstream consumers

  Index rank() const { return modes.cols(); }
};

/// Snapshot-method POD via eigendecomposition of the centered Gram matrix.
/// Modes below the numerical-rank cutoff (sigma_i < 1e-12 sigma_1) are
/// truncated.
PodBasis compute_pod(const Mat& Y, const Vec& y0);

/// Fraction of the snapshot energy captured by the first n_m modes.
double energy_fraction(const PodBasis& basis, Index n_m);

/// alpha_i = v_i . (y - y0) for the first basis.n_m modes.
Vec project_coefficients(const Vec& signal, const PodBasis& basis);

/// Top-k eigenvalues and total energy of the centered Gram operator without
/// forming the Gram matrix, via Lanczos iteration on x -> Yc^T (Yc x).
/// Memory-bounded path for paper-scale snapshot counts.
struct PodSpectrum {
  Vec top_eigenvalues;  // descending, length k (sigma^2 / n_s convention)
  double total_energy = 0.0;
};
PodSpectrum pod_spectrum(const Mat& Y, const Vec& y0, Index k,
                         std::uint64_t seed = 12345);

}  // namespace phm
