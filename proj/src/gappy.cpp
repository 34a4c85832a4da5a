#include "phm/gappy.hpp"

#include <Eigen/QR>

namespace phm {

Digest128 schedule_digest(const SensorSchedule& schedule) {
  Digest128 d{kFnvOffset, 0x9e3779b97f4a7c15ull};
  for (Index idx : schedule.indices) {
    std::int64_t v = idx;
    d.lo = fnv1a64(&v, sizeof(v), d.lo);
    d.hi = fnv1a64(&v, sizeof(v), d.hi);
  }
  return d;
}

CompressedSignal compress_signal(const Vec& signal,
                                 const SensorSchedule& schedule) {
  CompressedSignal c;
  c.values = Vec(schedule.count());
  for (Index j = 0; j < schedule.count(); ++j) {
    Index idx = schedule.indices[std::size_t(j)];
    require(idx >= 0 && idx < signal.size(),
            "compress_signal: schedule index outside the signal");
    c.values[j] = signal[idx];
  }
  c.schedule_hash = schedule_digest(schedule);
  return c;
}

GappyResult reconstruct_coefficients(const CompressedSignal& y_hat,
                                     const PodBasis& basis,
                                     const SensorSchedule& schedule,
                                     Index n_m) {
  if (n_m < 0) n_m = basis.n_m > 0 ? basis.n_m : basis.rank();
  const Index n_w = schedule.count();
  require(y_hat.values.size() == n_w, "compressed signal length mismatch");
  require(y_hat.schedule_hash == schedule_digest(schedule),
          "compressed signal was taken with a different schedule");
  require(n_m >= 1 && n_m <= basis.rank(), "bad mode count");
  if (n_m > n_w)
    throw ValidationError("gappy reconstruction underdetermined: n_m = " +
                          std::to_string(n_m) + " > n_w = " +
                          std::to_string(n_w));

  Mat v_hat(n_w, n_m);
  Vec y0_hat(n_w);
  for (Index j = 0; j < n_w; ++j) {
    Index idx = schedule.indices[std::size_t(j)];
    v_hat.row(j) = basis.modes.row(idx).head(n_m);
    y0_hat[j] = basis.y0[idx];
  }

  // rank-revealing LS on v_hat itself; cond(G) = cond(v_hat)^2
  Eigen::ColPivHouseholderQR<Mat> qr(v_hat);
  Vec rdiag = qr.matrixR().diagonal().head(n_m).cwiseAbs();
  double cond_vhat = rdiag.minCoeff() > 0.0
                         ? rdiag.maxCoeff() / rdiag.minCoeff()
                         : std::numeric_limits<double>::infinity();
  GappyResult res;
  res.condition = cond_vhat * cond_vhat;
  res.warned_square = (n_m == n_w);
  if (res.condition > 1e12)
    throw NumericalError(
        "gappy matrix ill-conditioned (cond ~ " +
        std::to_string(res.condition) +
        "); too many modes for the sampling schedule");

  res.coefficients = qr.solve(y_hat.values - y0_hat);
  return res;
}

double coefficient_error(const Vec& alpha_gappy, const Vec& alpha_full) {
  require(alpha_gappy.size() == alpha_full.size(),
          "coefficient_error: length mismatch");
  double range = alpha_full.maxCoeff() - alpha_full.minCoeff();
  require(range > 0.0, "coefficient_error: zero coefficient range");
  double rms = std::sqrt((alpha_gappy - alpha_full).squaredNorm() /
                         double(alpha_full.size()));
  return rms / range;
}

}  // namespace phm
