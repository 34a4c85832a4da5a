#pragma once

#include "phm/pod.hpp"

namespace phm {

/// Informative time indices picked by a 1-D ring SOM over [t, v1..v_nm].
struct SensorSchedule {
  std::vector<Index> indices;  // strictly increasing, unique, in [0, n_e)
  Mat weights;                 // n_w x (n_m+1), trained prototype vectors
  Vec feature_mean, feature_std;  // standardization constants of T's columns
  int epochs = 0;
  std::uint64_t seed = 0;

  Index count() const { return Index(indices.size()); }
};

struct SomOptions {
  int epochs = 200;
  bool standardize = true;  // z-score the columns of T before training
  double lr_start = 0.5;
  double lr_end = 0.01;
  // neighborhood sigma decays linearly from n_w/4 to 0.5 over the epochs
};

/// Competitive learning over the rows of T = [t, v1, ..., v_nm]; after
/// training, the first weight component of each neuron is de-standardized
/// and snapped to the nearest acquisition-grid index (duplicates stepped to
/// the nearest unused index).
SensorSchedule train_som(const PodBasis& basis, const Vec& time_grid,
                         Index n_w, std::uint64_t seed,
                         const SomOptions& opts = {});

}  // namespace phm
