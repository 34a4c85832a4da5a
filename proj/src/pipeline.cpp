#include "phm/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <ctime>
#include <fstream>
#include <map>

#include "json.hpp"
#include "phm/matrix_io.hpp"

namespace phm {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, p);
}

}  // namespace

void PipelineConfig::validate() const {
  require(n_s >= 10, "config: n_s must be at least 10");
  require(n_m >= 1 && n_w >= n_m,
          "config: need 1 <= n_m <= n_w (gappy system underdetermined)");
  require(n_h >= 1, "config: n_h must be positive");
  require(svm_box_c > 0.0, "config: svm_box_c must be positive");
  require(rul_mc_runs >= 30, "config: rul_mc_runs must be at least 30");
  require(mlp_max_epochs >= 1, "config: mlp_max_epochs must be positive");
  require(chirp_duration > 0.0 && sample_rate > 0.0,
          "config: command profile must have positive duration and rate");
  require(chirp_f_end > chirp_f_start && chirp_f_start >= 0.0,
          "config: chirp band must be increasing and non-negative");
  require(chirp_f_end <= sample_rate / 4.0,
          "config: chirp end frequency too close to Nyquist");
  actuator.validate();
  damage.validate();
}

PipelineConfig load_config(const fs::path& path) {
  std::ifstream is(path);
  require(bool(is), "config: cannot read " + path.string());
  json j;
  try {
    j = json::parse(is);
  } catch (const json::exception& e) {
    throw ValidationError("config: malformed JSON in " + path.string() + ": " +
                          e.what());
  }

  PipelineConfig cfg;
  auto need = [&](const char* field) -> const json& {
    if (!j.contains(field))
      throw ValidationError("config: missing required field '" +
                            std::string(field) + "'");
    return j.at(field);
  };
  cfg.seed = need("seed").get<std::uint64_t>();
  cfg.n_s = need("n_s").get<Index>();
  cfg.n_m = need("n_m").get<Index>();
  cfg.n_w = need("n_w").get<Index>();
  cfg.n_h = need("n_h").get<Index>();

  cfg.svm_box_c = j.value("svm_box_c", cfg.svm_box_c);
  cfg.kernel.degree = j.value("kernel_degree", cfg.kernel.degree);
  cfg.kernel.gamma = j.value("kernel_gamma", cfg.kernel.gamma);
  cfg.kernel.coef0 = j.value("kernel_coef0", cfg.kernel.coef0);
  cfg.rul_mc_runs = j.value("rul_mc_runs", cfg.rul_mc_runs);
  cfg.mlp_max_epochs = j.value("mlp_max_epochs", cfg.mlp_max_epochs);
  cfg.chirp_duration = j.value("chirp_duration", cfg.chirp_duration);
  cfg.chirp_amplitude = j.value("chirp_amplitude", cfg.chirp_amplitude);
  cfg.chirp_f_start = j.value("chirp_f_start", cfg.chirp_f_start);
  cfg.chirp_f_end = j.value("chirp_f_end", cfg.chirp_f_end);
  cfg.sample_rate = j.value("sample_rate", cfg.sample_rate);
  cfg.requirements.min_gain_margin_db =
      j.value("min_gain_margin_db", cfg.requirements.min_gain_margin_db);
  cfg.requirements.min_phase_margin_deg =
      j.value("min_phase_margin_deg", cfg.requirements.min_phase_margin_deg);
  cfg.requirements.min_cutoff_hz =
      j.value("min_cutoff_hz", cfg.requirements.min_cutoff_hz);

  if (j.contains("actuator")) {
    const json& a = j.at("actuator");
    ActuatorParams& p = cfg.actuator;
    p.resistance = a.value("resistance_ohm", p.resistance);
    p.inductance = a.value("inductance_h", p.inductance);
    p.kv = a.value("kv_vs_per_rad", p.kv);
    p.inertia = a.value("inertia_kg_m2", p.inertia);
    p.friction_nom = a.value("friction_nom_nm", p.friction_nom);
    p.viscous = a.value("viscous_nm_s_per_rad", p.viscous);
    p.gear_ratio = a.value("gear_ratio", p.gear_ratio);
    p.backlash_nom = a.value("backlash_nom_rad", p.backlash_nom);
    p.endstop = a.value("endstop_rad", p.endstop);
    p.kp_nom = a.value("kp_a_per_rad", p.kp_nom);
    p.i_sat = a.value("i_sat_a", p.i_sat);
    p.v_supply = a.value("v_supply_v", p.v_supply);
    p.load_torque = a.value("load_torque_nm", p.load_torque);
    p.pole_pairs = a.value("pole_pairs", p.pole_pairs);
    p.envelope_cutoff = a.value("envelope_cutoff_hz", p.envelope_cutoff);
    p.substeps = a.value("substeps", p.substeps);
    p.ecc_gain = a.value("ecc_gain", p.ecc_gain);
    p.ripple_amp = a.value("ripple_amp", p.ripple_amp);
    p.noise_sigma = a.value("noise_sigma_a", p.noise_sigma);
    p.noise_mult = a.value("noise_mult", p.noise_mult);
  }

  cfg.validate();
  return cfg;
}

void save_config(const PipelineConfig& cfg, const fs::path& path) {
  json j;
  j["seed"] = cfg.seed;
  j["n_s"] = cfg.n_s;
  j["n_m"] = cfg.n_m;
  j["n_w"] = cfg.n_w;
  j["n_h"] = cfg.n_h;
  j["svm_box_c"] = cfg.svm_box_c;
  j["kernel_degree"] = cfg.kernel.degree;
  j["kernel_gamma"] = cfg.kernel.gamma;
  j["kernel_coef0"] = cfg.kernel.coef0;
  j["rul_mc_runs"] = cfg.rul_mc_runs;
  j["mlp_max_epochs"] = cfg.mlp_max_epochs;
  j["chirp_duration"] = cfg.chirp_duration;
  j["chirp_amplitude"] = cfg.chirp_amplitude;
  j["chirp_f_start"] = cfg.chirp_f_start;
  j["chirp_f_end"] = cfg.chirp_f_end;
  j["sample_rate"] = cfg.sample_rate;
  j["min_gain_margin_db"] = cfg.requirements.min_gain_margin_db;
  j["min_phase_margin_deg"] = cfg.requirements.min_phase_margin_deg;
  j["min_cutoff_hz"] = cfg.requirements.min_cutoff_hz;
  {
    const ActuatorParams& p = cfg.actuator;
    json a;
    a["resistance_ohm"] = p.resistance;
    a["inductance_h"] = p.inductance;
    a["kv_vs_per_rad"] = p.kv;
    a["inertia_kg_m2"] = p.inertia;
    a["friction_nom_nm"] = p.friction_nom;
    a["viscous_nm_s_per_rad"] = p.viscous;
    a["gear_ratio"] = p.gear_ratio;
    a["backlash_nom_rad"] = p.backlash_nom;
    a["endstop_rad"] = p.endstop;
    a["kp_a_per_rad"] = p.kp_nom;
    a["i_sat_a"] = p.i_sat;
    a["v_supply_v"] = p.v_supply;
    a["load_torque_nm"] = p.load_torque;
    a["pole_pairs"] = p.pole_pairs;
    a["envelope_cutoff_hz"] = p.envelope_cutoff;
    a["substeps"] = p.substeps;
    a["ecc_gain"] = p.ecc_gain;
    a["ripple_amp"] = p.ripple_amp;
    a["noise_sigma_a"] = p.noise_sigma;
    a["noise_mult"] = p.noise_mult;
    j["actuator"] = a;
  }
  std::ofstream os(path, std::ios::binary);
  require(bool(os), "config: cannot write " + path.string());
  os << j.dump(2) << "\n";
}

CommandProfile config_command(const PipelineConfig& cfg) {
  return chirp_command(cfg.chirp_duration, cfg.chirp_amplitude,
                       cfg.chirp_f_start, cfg.chirp_f_end, cfg.sample_rate);
}

Assessor full_assessor(const PipelineConfig& cfg) {
  ActuatorParams params = cfg.actuator;
  Requirements reqs = cfg.requirements;
  return [params, reqs](const FaultVector& k) {
    return assess_full(k, params, reqs).label;
  };
}

ModelBundle run_offline(const PipelineConfig& cfg, const fs::path& out_dir,
                        std::ostream& log) {
  cfg.validate();
  fs::create_directories(out_dir);
  auto t0 = Clock::now();
  auto stage = [&](const char* name) {
    log << "[offline] " << name << " done at " << fmt(seconds_since(t0))
        << " s\n";
  };

  CommandProfile cmd = config_command(cfg);

  DesignMatrix lhs =
      latin_hypercube(cfg.n_s, kNumFaults, substream_seed(cfg.seed, "sampling"));
  DesignMatrix K = importance_rescale(lhs, {6});
  stage("sampling");

  SnapshotDataset ds =
      build_dataset(K, cmd, cfg.actuator, full_assessor(cfg), cfg.seed);
  save_dataset((out_dir / "dataset").string(), ds);
  stage("snapshots");

  // reference: noiseless lf envelope at the nominal condition
  SignalSnapshot ref = simulate_response(FaultVector::nominal(), cmd,
                                         cfg.actuator, Tier::lf);

  ModelBundle bundle;
  bundle.basis = compute_pod(ds.Y, ref.y);
  require(cfg.n_m <= bundle.basis.rank(),
          "offline: requested more modes than the snapshot rank");
  bundle.basis.n_m = cfg.n_m;
  stage("pod");

  bundle.schedule = train_som(bundle.basis, ref.t, cfg.n_w,
                              substream_seed(cfg.seed, "som"));
  bundle.y0_hat = compress_signal(bundle.basis.y0, bundle.schedule);
  stage("som");

  // network inputs come through the same gappy path the online code uses
  Mat inputs(ds.Y.cols(), cfg.n_m);
  for (Index i = 0; i < ds.Y.cols(); ++i) {
    CompressedSignal cs = compress_signal(ds.Y.col(i), bundle.schedule);
    inputs.row(i) =
        reconstruct_coefficients(cs, bundle.basis, bundle.schedule).coefficients;
  }
  MlpStop stop;
  stop.max_epochs = cfg.mlp_max_epochs;
  bundle.mlp = train_mlp(inputs, ds.K, cfg.n_h, stop,
                         substream_seed(cfg.seed, "mlp"));
  stage("mlp");

  bundle.svm = train_svm(ds.K, ds.phi, cfg.kernel, cfg.svm_box_c);
  stage("svm");

  bundle.damage = cfg.damage;
  bundle.actuator = cfg.actuator;
  bundle.requirements = cfg.requirements;
  bundle.master_seed = cfg.seed;
  {
    std::time_t now = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    bundle.created = buf;
  }
  save_bundle(bundle, out_dir / "bundle");
  stage("bundle");
  return bundle;
}

OnlineResult online_estimate(const ModelBundle& bundle,
                             const CompressedSignal& signal, Index n_mc,
                             std::uint64_t seed) {
  auto t0 = Clock::now();
  OnlineResult out;

  GappyResult g = reconstruct_coefficients(signal, bundle.basis, bundle.schedule);
  out.alpha = g.coefficients;
  out.gappy_condition = g.condition;
  out.k_est = mlp_forward(bundle.mlp, out.alpha);
  out.svm_score = svm_score(bundle.svm, out.k_est);
  out.label = out.svm_score >= 0.0 ? HealthLabel::healthy : HealthLabel::faulty;

  SvmScorer scorer(bundle.svm);
  Assessor surrogate = [&scorer](const FaultVector& k) {
    return scorer.label(k);
  };
  if (out.label == HealthLabel::faulty) {
    out.rul.sample_count = 0;  // already past the requirement boundary
  } else {
    out.rul = estimate_rul_quantiles(out.k_est, bundle.damage, surrogate, n_mc,
                                     substream_seed(seed, "rul"));
  }
  out.compute_ms = 1e3 * seconds_since(t0);
  return out;
}

namespace {

struct CsvFile {
  std::ofstream os;
  explicit CsvFile(const fs::path& p) : os(p, std::ios::binary) {
    require(bool(os), "report: cannot write " + p.string());
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i)
      os << cells[i] << (i + 1 < cells.size() ? "," : "\n");
  }
};

double median_of(std::vector<double> v) {
  require(!v.empty(), "median of empty set");
  std::sort(v.begin(), v.end());
  std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

void run_report(const ModelBundle& bundle, const SnapshotDataset& validation,
                const PipelineConfig& cfg, const fs::path& out_dir,
                std::ostream& log) {
  require(validation.Y.cols() > 0, "report: empty validation dataset");
  fs::create_directories(out_dir);
  auto t0 = Clock::now();
  json timings;

  const Index n = validation.Y.cols();
  const Index n_m = bundle.basis.n_m;

  // per-sample identification records
  Mat alphas(n, n_m);
  std::vector<FaultVector> k_est(static_cast<std::size_t>(n));
  std::vector<HealthLabel> pred(static_cast<std::size_t>(n));
  std::vector<double> err_alpha(static_cast<std::size_t>(n)), err_k(static_cast<std::size_t>(n));
  {
    CsvFile f(out_dir / "identification.csv");
    std::vector<std::string> hdr;
    for (int i = 1; i <= kNumFaults; ++i) hdr.push_back("k_act" + std::to_string(i));
    for (int i = 1; i <= kNumFaults; ++i) hdr.push_back("k_est" + std::to_string(i));
    hdr.insert(hdr.end(), {"err_k", "err_alpha", "label_actual", "label_pred"});
    f.row(hdr);
    for (Index s = 0; s < n; ++s) {
      CompressedSignal cs = compress_signal(validation.Y.col(s), bundle.schedule);
      Vec a = reconstruct_coefficients(cs, bundle.basis, bundle.schedule)
                  .coefficients;
      alphas.row(s) = a;
      Vec a_full = project_coefficients(validation.Y.col(s), bundle.basis);
      err_alpha[std::size_t(s)] = coefficient_error(a, a_full);
      FaultVector act = fault_from_row({validation.K, {6}}, s);
      k_est[std::size_t(s)] = mlp_forward(bundle.mlp, a);
      err_k[std::size_t(s)] = fdi_error(k_est[std::size_t(s)], act);
      pred[std::size_t(s)] = assess_surrogate(bundle.svm, act);

      std::vector<std::string> cells;
      for (int i = 0; i < kNumFaults; ++i) cells.push_back(fmt(act[i]));
      for (int i = 0; i < kNumFaults; ++i)
        cells.push_back(fmt(k_est[std::size_t(s)][i]));
      cells.push_back(fmt(err_k[std::size_t(s)]));
      cells.push_back(fmt(err_alpha[std::size_t(s)]));
      cells.push_back(validation.phi[std::size_t(s)] == HealthLabel::healthy
                          ? "healthy" : "faulty");
      cells.push_back(pred[std::size_t(s)] == HealthLabel::healthy ? "healthy"
                                                                   : "faulty");
      f.row(cells);
    }
  }
  timings["identification_s"] = seconds_since(t0);
  log << "[report] identification done\n";

  // confusion matrix, actual condition in rows
  {
    long hh = 0, hf = 0, fh = 0, ff = 0;
    for (Index s = 0; s < n; ++s) {
      bool ah = validation.phi[std::size_t(s)] == HealthLabel::healthy;
      bool ph = pred[std::size_t(s)] == HealthLabel::healthy;
      (ah ? (ph ? hh : hf) : (ph ? fh : ff))++;
    }
    CsvFile f(out_dir / "confusion.csv");
    f.row({"", "pred_healthy", "pred_faulty"});
    f.row({"actual_healthy", std::to_string(hh), std::to_string(hf)});
    f.row({"actual_faulty", std::to_string(fh), std::to_string(ff)});
    f.row({"accuracy", fmt(double(hh + ff) / double(n)), ""});
  }

  // coefficient error vs retained mode count
  {
    CsvFile f(out_dir / "nm_sweep.csv");
    f.row({"n_m", "median_err_alpha"});
    Index max_m = std::min<Index>(bundle.schedule.count(), bundle.basis.rank());
    Index step = std::max<Index>(1, max_m / 16);
    // a single mode has zero coefficient range, so the error metric is
    // undefined there; start the sweep at two modes
    for (Index m = 2; m <= max_m; m += step) {
      std::vector<double> errs;
      for (Index s = 0; s < n; ++s) {
        CompressedSignal cs =
            compress_signal(validation.Y.col(s), bundle.schedule);
        Vec a = reconstruct_coefficients(cs, bundle.basis, bundle.schedule, m)
                    .coefficients;
        PodBasis cut = bundle.basis;
        cut.n_m = m;
        Vec a_full = project_coefficients(validation.Y.col(s), cut);
        errs.push_back(coefficient_error(a, a_full));
      }
      f.row({std::to_string(m), fmt(median_of(errs))});
    }
  }
  timings["nm_sweep_s"] = seconds_since(t0);
  log << "[report] mode-count sweep done\n";

  // hidden-size sweep: retrain on the first 70% of the validation set,
  // score on the rest; wall time goes to timings.json only
  {
    Index n_train = std::max<Index>(Index(0.7 * double(n)), 1);
    Index n_test = n - n_train;
    require(n_test > 0, "report: validation set too small for the sweep");
    Mat tin = alphas.topRows(n_train);
    Mat ttar = validation.K.topRows(n_train);
    std::vector<Index> sizes{std::max<Index>(cfg.n_h / 4, 2),
                             std::max<Index>(cfg.n_h / 2, 3), cfg.n_h};
    std::sort(sizes.begin(), sizes.end());
    sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
    CsvFile f(out_dir / "nh_sweep.csv");
    f.row({"n_h", "mean_abs_err"});
    json sweep_times = json::array();
    for (Index n_h : sizes) {
      auto ts = Clock::now();
      MlpStop stop;
      stop.max_epochs = cfg.mlp_max_epochs;
      MlpModel m = train_mlp(tin, ttar, n_h, stop,
                             substream_seed(bundle.master_seed, "report-mlp",
                                            std::uint64_t(n_h)));
      double err = 0.0;
      for (Index s = n_train; s < n; ++s) {
        FaultVector e = mlp_forward(m, Vec(alphas.row(s)));
        for (int i = 0; i < kNumFaults; ++i)
          err += std::abs(e[i] - validation.K(s, i));
      }
      err /= double(n_test * kNumFaults);
      f.row({std::to_string(n_h), fmt(err)});
      sweep_times.push_back({{"n_h", n_h}, {"seconds", seconds_since(ts)}});
    }
    timings["nh_sweep"] = sweep_times;
  }
  log << "[report] hidden-size sweep done\n";

  // RUL scatter on healthy samples: estimate from identified k, reference
  // from the actual k, both under the surrogate assessor
  std::vector<double> errs_rul, deltas_rul;
  {
    SvmScorer scorer(bundle.svm);
    Assessor surrogate = [&scorer](const FaultVector& k) {
      return scorer.label(k);
    };
    Index n_mc = std::min<Index>(cfg.rul_mc_runs, 50);
    CsvFile f(out_dir / "rul_scatter.csv");
    f.row({"sample", "est_5", "est_50", "est_95", "ref_5", "ref_50", "ref_95",
           "err_rul", "delta_rul"});
    Index done = 0;
    for (Index s = 0; s < n && done < 30; ++s) {
      if (pred[std::size_t(s)] != HealthLabel::healthy) continue;
      if (assess_surrogate(bundle.svm, k_est[std::size_t(s)]) !=
          HealthLabel::healthy)
        continue;
      FaultVector act = fault_from_row({validation.K, {6}}, s);
      RulEstimate est = estimate_rul_quantiles(
          k_est[std::size_t(s)], bundle.damage, surrogate, n_mc,
          substream_seed(bundle.master_seed, "report-rul-est", std::uint64_t(s)));
      RulEstimate ref = estimate_rul_quantiles(
          act, bundle.damage, surrogate, n_mc,
          substream_seed(bundle.master_seed, "report-rul-ref", std::uint64_t(s)));
      if (ref.rul_50 <= 0.0) continue;
      auto [err, delta] = rul_metrics(est, ref);
      errs_rul.push_back(err);
      deltas_rul.push_back(delta);
      f.row({std::to_string(s), fmt(est.rul_5), fmt(est.rul_50), fmt(est.rul_95),
             fmt(ref.rul_5), fmt(ref.rul_50), fmt(ref.rul_95), fmt(err),
             fmt(delta)});
      ++done;
    }
  }
  timings["rul_scatter_s"] = seconds_since(t0);
  log << "[report] rul scatter done\n";

  // aggregates
  {
    json agg;
    agg["samples"] = n;
    agg["median_err_alpha"] = median_of(err_alpha);
    agg["median_err_k"] = median_of(err_k);
    json per_param = json::array();
    for (int i = 0; i < kNumFaults; ++i) {
      double e = 0.0;
      for (Index s = 0; s < n; ++s)
        e += std::abs(k_est[std::size_t(s)][i] - validation.K(s, i));
      per_param.push_back(e / double(n));
    }
    agg["mean_abs_err_per_param"] = per_param;
    long correct = 0, healthy = 0;
    for (Index s = 0; s < n; ++s) {
      if (pred[std::size_t(s)] == validation.phi[std::size_t(s)]) ++correct;
      if (validation.phi[std::size_t(s)] == HealthLabel::healthy) ++healthy;
    }
    agg["assessment_accuracy"] = double(correct) / double(n);
    agg["healthy_fraction"] = double(healthy) / double(n);
    if (!errs_rul.empty()) {
      agg["median_err_rul"] = median_of(errs_rul);
      agg["median_delta_rul"] = median_of(deltas_rul);
    }
    std::ofstream os(out_dir / "aggregate.json", std::ios::binary);
    os << agg.dump(2) << "\n";
  }

  timings["total_s"] = seconds_since(t0);
  std::ofstream os(out_dir / "timings.json", std::ios::binary);
  os << timings.dump(2) << "\n";
}

Digest128 report_digest(const fs::path& dir) {
  std::vector<std::string> names;
  for (const auto& e : fs::directory_iterator(dir)) {
    std::string name = e.path().filename().string();
    if (name == "timings.json") continue;  // wall times are not deterministic
    names.push_back(name);
  }
  std::sort(names.begin(), names.end());
  require(!names.empty(), "report digest: no report files in " + dir.string());
  Digest128 d{kFnvOffset, 0x84222325cbf29ce4ull};
  for (const std::string& name : names) {
    d.lo = fnv1a64(name, d.lo);
    d.hi = fnv1a64(name, d.hi);
    Digest128 fd = digest_file((dir / name).string());
    d.lo = fnv1a64(&fd.lo, sizeof(fd.lo), d.lo);
    d.hi = fnv1a64(&fd.hi, sizeof(fd.hi), d.hi);
  }
  return d;
}

}  // namespace phm
