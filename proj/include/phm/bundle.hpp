#pragma once

#include <filesystem>

#include "phm/gappy.hpp"
#include "phm/mlp.hpp"
#include "phm/rul.hpp"
#include "phm/svm.hpp"

namespace phm {

/// Every trained artifact the online path needs, saved as one
/// self-describing directory: binary matrices plus manifest.json with a
/// digest per artifact and a bundle hash over everything except the
/// creation time (so reruns of the same config hash identically).
struct ModelBundle {
  PodBasis basis;
  SensorSchedule schedule;
  CompressedSignal y0_hat;  // reference signal at the schedule points
  MlpModel mlp;
  SvmModel svm;
  DamageModel damage;
  ActuatorParams actuator;
  Requirements requirements;

  std::uint64_t master_seed = 0;
  std::string version = "1";
  std::string created;  // informational only, excluded from the hash

  Digest128 hash() const;
  void validate() const;  // cross-artifact size and hash consistency
};

void save_bundle(const ModelBundle& bundle, const std::filesystem::path& dir);
ModelBundle load_bundle(const std::filesystem::path& dir);

/// Wire form of a compressed signal: 16-byte bundle hash (lo, hi as
/// little-endian uint64) followed by n_w float64 little-endian samples.
void save_compressed(const CompressedSignal& cs, const Digest128& bundle_hash,
                     const std::filesystem::path& file);
CompressedSignal load_compressed(const ModelBundle& bundle,
                                 const std::filesystem::path& file);

}  // namespace phm
