#include "phm/pod.hpp"

#include <Eigen/Eigenvalues>

namespace phm {

PodBasis compute_pod(const Mat& Y, const Vec& y0) {
  require(Y.cols() >= 2, "compute_pod: need at least 2 snapshots");
  require(Y.rows() == y0.size(), "compute_pod: y0 length mismatch");
  const Index n_s = Y.cols();

  Mat Yc = Y.colwise() - y0;
  Mat gram = Yc.transpose() * Yc;

  Eigen::SelfAdjointEigenSolver<Mat> eig(gram);
  require(eig.info() == Eigen::Success, "compute_pod: eigensolver failed");
  Vec ev = eig.eigenvalues();  // ascending

  PodBasis basis;
  basis.y0 = y0;
  basis.total_energy = std::max(ev.sum(), 0.0) / double(n_s);

  double sigma1 = std::sqrt(std::max(ev[n_s - 1], 0.0));
  Index rank = 0;
  for (Index i = 0; i < n_s; ++i) {
    double sigma = std::sqrt(std::max(ev[n_s - 1 - i], 0.0));
    if (sigma < 1e-12 * sigma1) break;
    ++rank;
  }
  require(rank >= 1, "compute_pod: snapshot matrix is numerically zero");

  basis.modes = Mat(Y.rows(), rank);
  basis.eigenvalues = Vec(rank);
  for (Index i = 0; i < rank; ++i) {
    double lambda = std::max(ev[n_s - 1 - i], 0.0);
    double sigma = std::sqrt(lambda);
    basis.modes.col(i) = Yc * eig.eigenvectors().col(n_s - 1 - i) / sigma;
    basis.eigenvalues[i] = lambda / double(n_s);
  }
  basis.n_m = rank;
  return basis;
}

double energy_fraction(const PodBasis& basis, Index n_m) {
  require(n_m >= 1 && n_m <= basis.rank(), "energy_fraction: bad mode count");
  require(basis.total_energy > 0.0, "energy_fraction: zero-energy basis");
  return basis.eigenvalues.head(n_m).sum() / basis.total_energy;
}

Vec project_coefficients(const Vec& signal, const PodBasis& basis) {
  require(signal.size() == basis.y0.size(),
          "project_coefficients: signal length mismatch");
  Index n_m = basis.n_m > 0 ? basis.n_m : basis.rank();
  return basis.modes.leftCols(n_m).transpose() * (signal - basis.y0);
}

PodSpectrum pod_spectrum(const Mat& Y, const Vec& y0, Index k,
                         std::uint64_t seed) {
  const Index n_s = Y.cols();
  require(k >= 1 && k <= n_s, "pod_spectrum: bad k");
  require(Y.rows() == y0.size(), "pod_spectrum: y0 length mismatch");

  PodSpectrum out;
  double total = 0.0;
  for (Index j = 0; j < n_s; ++j) total += (Y.col(j) - y0).squaredNorm();
  out.total_energy = total / double(n_s);

  // Lanczos with full reorthogonalization on x -> Yc^T (Yc x), Yc applied
  // implicitly so the centered matrix is never materialized.
  const Index m = std::min(n_s, std::max<Index>(4 * k, 120));
  Mat Q(n_s, m);
  Vec alpha(m), beta(m);

  auto apply = [&](const Vec& x) -> Vec {
    Vec z = Y * x;
    z.noalias() -= y0 * x.sum();
    Vec w = Y.transpose() * z;
    w.array() -= y0.dot(z);
    return w;
  };

  Rng rng(seed);
  Vec q(n_s);
  for (Index i = 0; i < n_s; ++i) q[i] = rng.gaussian();
  q.normalize();
  Q.col(0) = q;

  Index steps = 0;
  for (Index j = 0; j < m; ++j) {
    Vec w = apply(Q.col(j));
    alpha[j] = Q.col(j).dot(w);
    w -= alpha[j] * Q.col(j);
    if (j > 0) w -= beta[j - 1] * Q.col(j - 1);
    // full reorthogonalization, twice
    for (int pass = 0; pass < 2; ++pass)
      w -= Q.leftCols(j + 1) * (Q.leftCols(j + 1).transpose() * w);
    double nrm = w.norm();
    steps = j + 1;
    if (nrm < 1e-12 || j + 1 == m) {
      beta[j] = 0.0;
      break;
    }
    beta[j] = nrm;
    Q.col(j + 1) = w / nrm;
  }

  Mat T = Mat::Zero(steps, steps);
  for (Index j = 0; j < steps; ++j) {
    T(j, j) = alpha[j];
    if (j + 1 < steps) T(j, j + 1) = T(j + 1, j) = beta[j];
  }
  Eigen::SelfAdjointEigenSolver<Mat> eig(T);
  Vec ev = eig.eigenvalues();  // ascending
  Index kk = std::min(k, steps);
  out.top_eigenvalues = Vec(kk);
  for (Index i = 0; i < kk; ++i)
    out.top_eigenvalues[i] = std::max(ev[steps - 1 - i], 0.0) / double(n_s);
  return out;
}

}  // namespace phm
