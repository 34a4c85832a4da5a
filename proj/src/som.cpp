#include "phm/som.hpp"

#include <algorithm>
#include <iostream>
#include <numeric>

namespace phm {

SensorSchedule train_som(const PodBasis& basis, const Vec& time_grid,
                         Index n_w, std::uint64_t seed,
                         const SomOptions& opts) {
  const Index n_e = time_grid.size();
  const Index n_m = basis.n_m > 0 ? basis.n_m : basis.rank();
  require(n_e == basis.y0.size(), "train_som: time grid length mismatch");
  require(n_w >= 1 && n_w <= n_e, "train_som: need 1 <= n_w <= n_e");
  require(opts.epochs >= 1, "train_som: epochs must be >= 1");
  if (n_w < n_m)
    std::cerr << "train_som: n_w < n_m; the schedule may not resolve all "
                 "retained modes\n";

  const Index dim = n_m + 1;
  Mat T(n_e, dim);
  T.col(0) = time_grid;
  T.rightCols(n_m) = basis.modes.leftCols(n_m);

  Vec mean = Vec::Zero(dim), stdev = Vec::Ones(dim);
  if (opts.standardize) {
    mean = T.colwise().mean();
    for (Index c = 0; c < dim; ++c) {
      double var = (T.col(c).array() - mean[c]).square().mean();
      stdev[c] = var > 0.0 ? std::sqrt(var) : 1.0;
      T.col(c) = (T.col(c).array() - mean[c]) / stdev[c];
    }
  }

  // neurons evenly spaced along the time axis, mode components at the mean
  Mat W = Mat::Zero(n_w, dim);
  double t_lo = T.col(0).minCoeff(), t_hi = T.col(0).maxCoeff();
  for (Index l = 0; l < n_w; ++l)
    W(l, 0) = n_w == 1 ? 0.5 * (t_lo + t_hi)
                       : t_lo + (t_hi - t_lo) * double(l) / double(n_w - 1);

  Rng rng(seed);
  std::vector<Index> order(static_cast<std::size_t>(n_e));
  std::iota(order.begin(), order.end(), Index(0));

  for (int epoch = 0; epoch < opts.epochs; ++epoch) {
    double progress = opts.epochs == 1 ? 0.0 : double(epoch) / (opts.epochs - 1);
    double lr = opts.lr_start + (opts.lr_end - opts.lr_start) * progress;
    double sigma = double(n_w) / 4.0 + (0.5 - double(n_w) / 4.0) * progress;
    sigma = std::max(sigma, 0.5);
    double inv2s2 = 1.0 / (2.0 * sigma * sigma);

    for (Index i = n_e - 1; i > 0; --i)
      std::swap(order[std::size_t(i)], order[rng.integer(std::uint64_t(i) + 1)]);

    for (Index idx : order) {
      Index winner = 0;
      double best = std::numeric_limits<double>::infinity();
      for (Index l = 0; l < n_w; ++l) {
        double d2 = (W.row(l).transpose() - T.row(idx).transpose()).squaredNorm();
        if (d2 < best) {
          best = d2;
          winner = l;
        }
      }
      for (Index l = 0; l < n_w; ++l) {
        Index ring = std::min(std::abs(l - winner), n_w - std::abs(l - winner));
        double h = std::exp(-double(ring * ring) * inv2s2);
        if (h < 1e-6) continue;
        W.row(l) += lr * h * (T.row(idx) - W.row(l));
      }
    }
  }

  // snap the de-standardized time components onto the acquisition grid
  SensorSchedule sched;
  sched.weights = W;
  sched.feature_mean = mean;
  sched.feature_std = stdev;
  sched.epochs = opts.epochs;
  sched.seed = seed;

  double dt = n_e > 1 ? (time_grid[n_e - 1] - time_grid[0]) / double(n_e - 1)
                      : 1.0;
  std::vector<bool> used(std::size_t(n_e), false);
  for (Index l = 0; l < n_w; ++l) {
    double t = W(l, 0) * stdev[0] + mean[0];
    Index idx = Index(std::llround((t - time_grid[0]) / dt));
    idx = std::clamp<Index>(idx, 0, n_e - 1);
    if (used[std::size_t(idx)]) {
      // step outward to the nearest unused grid index
      for (Index off = 1; off < n_e; ++off) {
        if (idx - off >= 0 && !used[std::size_t(idx - off)]) {
          idx -= off;
          break;
        }
        if (idx + off < n_e && !used[std::size_t(idx + off)]) {
          idx += off;
          break;
        }
      }
    }
    used[std::size_t(idx)] = true;
    sched.indices.push_back(idx);
  }
  std::sort(sched.indices.begin(), sched.indices.end());
  return sched;
}

}  // namespace phm
