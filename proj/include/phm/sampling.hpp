#pragma once

#include <functional>
#include <set>

#include "phm/sim.hpp"
#include "phm/types.hpp"

namespace phm {

/// Rows are sampling points in [0,1]^n_k; exempt columns are passed through
/// the importance rescaling unchanged.
struct DesignMatrix {
  Mat entries;             // n_s x n_k
  std::set<int> exempt;    // column indices not rescaled

  Index rows() const { return entries.rows(); }
  Index cols() const { return entries.cols(); }
};

/// Stratified uniform design: each column is a random permutation of
/// (perm(0..n_s-1) + U(0,1)) / n_s.
DesignMatrix latin_hypercube(Index n_s, Index n_k, std::uint64_t seed);

/// Importance rescaling K_ij = J_ij^n_k on non-exempt columns; densifies the
/// sampling near the origin and makes the L-inf norm of the rows uniform.
DesignMatrix importance_rescale(const DesignMatrix& j,
                                const std::set<int>& exempt);

FaultVector fault_from_row(const DesignMatrix& k, Index row);

struct SnapshotDataset {
  Mat K;                          // n_s x n_k fault conditions
  Mat Y;                          // n_e x n_s envelope signals
  std::vector<HealthLabel> phi;   // n_s assessment labels
  std::uint64_t seed = 0;
  std::string config_hash;
  std::vector<Index> dropped;     // rows whose simulation diverged
};

using Assessor = std::function<HealthLabel(const FaultVector&)>;

/// Runs the truth-tier simulator and the assessment function for every row
/// of K. Rows with diverging simulations are dropped and reported. Noise
/// seeds derive per-row from `seed`, so the result is a pure function of
/// (K, cmd, params, seed).
SnapshotDataset build_dataset(const DesignMatrix& K, const CommandProfile& cmd,
                              const ActuatorParams& params,
                              const Assessor& assessor, std::uint64_t seed);

void save_dataset(const std::string& dir, const SnapshotDataset& ds);
SnapshotDataset load_dataset(const std::string& dir);

}  // namespace phm
