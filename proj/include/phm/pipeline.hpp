#pragma once

#include "phm/assessment.hpp"
#include "phm/bundle.hpp"
#include "phm/sampling.hpp"

namespace phm {

/// Everything the offline pipeline needs, read from a JSON config file.
/// Missing required fields raise a ValidationError naming the field.
struct PipelineConfig {
  std::uint64_t seed = 1;
  Index n_s = 1000;  // snapshot count
  Index n_m = 22;    // retained modes
  Index n_w = 30;    // schedule points
  Index n_h = 20;    // hidden neurons
  double svm_box_c = 10.0;
  KernelSpec kernel;
  Index rul_mc_runs = 100;
  int mlp_max_epochs = 150;

  double chirp_duration = 0.5;    // [s]
  double chirp_amplitude = 5e-3;  // [rad]
  double chirp_f_start = 0.0;     // [Hz]
  double chirp_f_end = 15.0;      // [Hz]
  double sample_rate = 20000.0;   // [Hz]

  ActuatorParams actuator;
  Requirements requirements;
  DamageModel damage = DamageModel::defaults();

  void validate() const;
};

PipelineConfig load_config(const std::filesystem::path& path);
void save_config(const PipelineConfig& cfg, const std::filesystem::path& path);

CommandProfile config_command(const PipelineConfig& cfg);

/// Full assessment oracle bound to the config's actuator and requirements.
Assessor full_assessor(const PipelineConfig& cfg);

/// The whole offline lane: sampling -> snapshots -> POD -> schedule -> MLP
/// -> SVM -> bundle. The dataset and bundle are persisted under out_dir
/// (dataset/ and bundle/); stage timings go to the given stream.
ModelBundle run_offline(const PipelineConfig& cfg,
                        const std::filesystem::path& out_dir,
                        std::ostream& log);

struct OnlineResult {
  Vec alpha;                  // reconstructed coefficients
  FaultVector k_est;
  HealthLabel label = HealthLabel::faulty;
  double svm_score = 0.0;
  double gappy_condition = 0.0;
  RulEstimate rul;
  double compute_ms = 0.0;    // post-acquisition compute, excluding I/O
};

/// The online lane. Takes only a CompressedSignal: full-length buffers stop
/// at the acquisition boundary. Health is assessed with the SVM surrogate;
/// an initially faulty state short-circuits to RUL zero.
OnlineResult online_estimate(const ModelBundle& bundle,
                             const CompressedSignal& signal, Index n_mc,
                             std::uint64_t seed);

/// Validation report: per-sample identification records, confusion matrix,
/// mode-count and hidden-size sweeps, RUL scatter. Timings are written to a
/// separate file so the hashed report files rerun byte-identically.
void run_report(const ModelBundle& bundle, const SnapshotDataset& validation,
                const PipelineConfig& cfg, const std::filesystem::path& out_dir,
                std::ostream& log);

/// Combined digest of the deterministic report files in a directory.
Digest128 report_digest(const std::filesystem::path& dir);

}  // namespace phm
