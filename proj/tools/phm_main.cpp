#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "phm/matrix_io.hpp"
#include "phm/pipeline.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

phm::FaultVector parse_fault(const std::string& spec) {
  phm::FaultVector k;
  std::stringstream ss(spec);
  std::string tok;
  int i = 0;
  while (std::getline(ss, tok, ',')) {
    phm::require(i < phm::kNumFaults, "--k: expected 8 components");
    try {
      k[i++] = std::stod(tok);
    } catch (const std::exception&) {
      throw phm::ValidationError("--k: bad number '" + tok + "'");
    }
  }
  phm::require(i == phm::kNumFaults, "--k: expected 8 components");
  k.validate();
  return k;
}

// A signal file is either a full-length raw envelope in the binary matrix
// format (compressed here, at the ingestion boundary) or an already
// compressed wire-format file.
phm::CompressedSignal ingest_signal(const phm::ModelBundle& bundle,
                                    const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  phm::require(bool(is), "cannot read signal file " + path);
  char magic[8] = {};
  is.read(magic, 8);
  is.close();
  if (std::string_view(magic, 8) == std::string_view("PHMMAT1\0", 8)) {
    phm::Mat m = phm::load_matrix(path);
    phm::require(m.cols() == 1, "signal file must be a single column");
    phm::require(m.rows() == bundle.basis.y0.size(),
                 "signal length does not match the acquisition grid");
    return phm::compress_signal(m.col(0), bundle.schedule);
  }
  return phm::load_compressed(bundle, path);
}

json rul_json(const phm::OnlineResult& r) {
  json j;
  j["rul_5"] = r.rul.rul_5;
  j["rul_50"] = r.rul.rul_50;
  j["rul_95"] = r.rul.rul_95;
  j["censored"] = r.rul.censored;
  j["label"] = r.label == phm::HealthLabel::healthy ? "healthy" : "faulty";
  json k = json::array();
  for (int i = 0; i < phm::kNumFaults; ++i) k.push_back(r.k_est[i]);
  j["k_estimated"] = k;
  j["svm_score"] = r.svm_score;
  j["gappy_condition"] = r.gappy_condition;
  j["compute_ms"] = r.compute_ms;
  return j;
}

void emit(const json& j, const std::string& out) {
  if (out.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::ofstream os(out, std::ios::binary);
    phm::require(bool(os), "cannot write " + out);
    os << j.dump(2) << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"EMA prognostics toolkit: signal compression, fault "
               "identification, health assessment and RUL estimation"};
  app.require_subcommand(1);

  std::string config_path, bundle_dir, out_path, signal_path, dataset_dir;
  std::string k_spec, trajectory_path;
  std::uint64_t seed = 0;
  bool have_seed = false, surrogate = false;
  phm::Index n_mc = 100;

  auto add_seed = [&](CLI::App* c) {
    c->add_option("--seed", seed, "master seed override")
        ->each([&](const std::string&) { have_seed = true; });
  };

  phm::Index n_s_override = 0;
  auto* gen = app.add_subcommand("gen", "generate a snapshot dataset");
  gen->add_option("--config", config_path, "pipeline config JSON (defaults used if omitted)");
  gen->add_option("--n-s", n_s_override, "snapshot count override");
  gen->add_option("--out", out_path, "output dataset directory")->required();
  add_seed(gen);

  auto* offline = app.add_subcommand("offline", "run the offline pipeline");
  offline->add_option("--config", config_path, "pipeline config JSON")->required();
  offline->add_option("--out", out_path, "output directory")->required();
  add_seed(offline);

  auto* online = app.add_subcommand("online", "online estimate from a signal");
  online->add_option("--bundle", bundle_dir, "model bundle directory")->required();
  online->add_option("--signal", signal_path, "signal file (raw or compressed)");
  online->add_option("--simulate", k_spec,
                     "simulate a truth-tier signal for k1,...,k8 instead");
  online->add_option("--out", out_path, "write JSON here instead of stdout");
  online->add_option("--mc", n_mc, "Monte-Carlo propagation count");
  add_seed(online);

  auto* assess = app.add_subcommand("assess", "health assessment of a fault state");
  assess->add_option("--k", k_spec, "fault vector k1,...,k8")->required();
  assess->add_option("--bundle", bundle_dir,
                     "bundle directory (needed for --surrogate)");
  assess->add_flag("--surrogate", surrogate, "use the SVM surrogate");
  assess->add_option("--out", out_path, "write JSON here instead of stdout");

  auto* rul = app.add_subcommand("rul", "RUL estimate from a signal");
  rul->add_option("--bundle", bundle_dir, "model bundle directory")->required();
  rul->add_option("--signal", signal_path, "signal file (raw or compressed)")
      ->required();
  rul->add_option("--out", out_path, "write JSON here instead of stdout");
  rul->add_option("--trajectory", trajectory_path,
                  "also dump one deterministic trajectory as CSV");
  rul->add_option("--mc", n_mc, "Monte-Carlo propagation count");
  add_seed(rul);

  auto* report = app.add_subcommand("report", "validation report for a bundle");
  report->add_option("--bundle", bundle_dir, "model bundle directory")->required();
  report->add_option("--dataset", dataset_dir, "validation dataset directory")
      ->required();
  report->add_option("--out", out_path, "report output directory")->required();
  report->add_option("--config", config_path, "pipeline config JSON");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      phm::PipelineConfig cfg;
      if (!config_path.empty()) cfg = phm::load_config(config_path);
      if (have_seed) cfg.seed = seed;
      if (n_s_override > 0) cfg.n_s = n_s_override;
      phm::DesignMatrix lhs = phm::latin_hypercube(
          cfg.n_s, phm::kNumFaults, phm::substream_seed(cfg.seed, "sampling"));
      phm::DesignMatrix K = phm::importance_rescale(lhs, {6});
      phm::SnapshotDataset ds =
          phm::build_dataset(K, phm::config_command(cfg), cfg.actuator,
                             phm::full_assessor(cfg), cfg.seed);
      phm::save_dataset(out_path, ds);
      std::cerr << "dataset with " << ds.Y.cols() << " snapshots written to "
                << out_path << "\n";
    } else if (*offline) {
      phm::PipelineConfig cfg = phm::load_config(config_path);
      if (have_seed) cfg.seed = seed;
      phm::ModelBundle b = phm::run_offline(cfg, out_path, std::cerr);
      std::cout << "bundle_hash " << b.hash().hex() << "\n";
    } else if (*online || *rul) {
      phm::ModelBundle b = phm::load_bundle(bundle_dir);
      phm::CompressedSignal cs;
      if (*online && !k_spec.empty()) {
        phm::require(signal_path.empty(), "--signal and --simulate are exclusive");
        phm::FaultVector k = parse_fault(k_spec);
        phm::CommandProfile cmd =
            phm::chirp_command(0.5, 5e-3, 0.0, 15.0,
                               double(b.basis.y0.size() - 1) / 0.5);
        phm::SignalSnapshot sig = phm::simulate_response(
            k, cmd, b.actuator, phm::Tier::truth,
            phm::substream_seed(have_seed ? seed : 0, "sim-noise"));
        cs = phm::compress_signal(sig.y, b.schedule);
      } else {
        phm::require(!signal_path.empty(), "need --signal (or --simulate)");
        cs = ingest_signal(b, signal_path);
      }
      phm::OnlineResult r =
          phm::online_estimate(b, cs, n_mc, have_seed ? seed : b.master_seed);
      emit(rul_json(r), out_path);
      if (*rul && !trajectory_path.empty()) {
        phm::Assessor sur = [&b](const phm::FaultVector& k) {
          return phm::assess_surrogate(b.svm, k);
        };
        phm::Propagation p =
            phm::propagate_once(r.k_est, b.damage, sur, {}, true);
        std::ofstream os(trajectory_path, std::ios::binary);
        phm::require(bool(os), "cannot write " + trajectory_path);
        os << "t_hours,k1,k2,k3,k4,k5,k6,k7,k8\n";
        for (std::size_t i = 0; i < p.trajectory.size(); ++i) {
          os << double(i) * b.damage.dt;
          for (int c = 0; c < phm::kNumFaults; ++c)
            os << "," << p.trajectory[i][c];
          os << "\n";
        }
      }
    } else if (*assess) {
      phm::FaultVector k = parse_fault(k_spec);
      json j;
      if (surrogate) {
        phm::require(!bundle_dir.empty(), "--surrogate needs --bundle");
        phm::ModelBundle b = phm::load_bundle(bundle_dir);
        double score = phm::svm_score(b.svm, k);
        j["label"] = score >= 0.0 ? "healthy" : "faulty";
        j["score"] = score;
      } else {
        phm::ActuatorParams params;
        phm::Requirements reqs;
        if (!bundle_dir.empty()) {
          phm::ModelBundle b = phm::load_bundle(bundle_dir);
          params = b.actuator;
          reqs = b.requirements;
        }
        phm::MarginsRecord m = phm::assess_full(k, params, reqs);
        j["label"] = m.label == phm::HealthLabel::healthy ? "healthy" : "faulty";
        j["gain_margin_db"] = m.gain_margin_db;
        j["phase_margin_deg"] = m.phase_margin_deg;
        j["cutoff_hz"] = m.cutoff_hz;
      }
      emit(j, out_path);
    } else if (*report) {
      phm::ModelBundle b = phm::load_bundle(bundle_dir);
      phm::SnapshotDataset ds = phm::load_dataset(dataset_dir);
      phm::PipelineConfig cfg;
      if (!config_path.empty()) cfg = phm::load_config(config_path);
      cfg.n_h = b.mlp.hidden_size();
      cfg.n_m = b.basis.n_m;
      cfg.n_w = b.schedule.count();
      phm::run_report(b, ds, cfg, out_path, std::cerr);
      std::cout << "report_hash " << phm::report_digest(out_path).hex() << "\n";
    }
  } catch (const phm::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const phm::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
