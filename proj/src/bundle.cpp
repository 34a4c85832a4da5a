#include "phm/bundle.hpp"

#include <cstring>
#include <fstream>
#include <map>

#include "json.hpp"
#include "phm/matrix_io.hpp"

namespace phm {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

Mat as_column(const Vec& v) { return v; }

Vec as_vector(const Mat& m) {
  require(m.cols() == 1, "bundle: expected a column vector artifact");
  return m.col(0);
}

// The matrix artifacts a bundle directory contains, in load order.
std::map<std::string, Mat> artifact_matrices(const ModelBundle& b) {
  Mat indices(b.schedule.indices.size(), 1);
  for (Index i = 0; i < indices.rows(); ++i)
    indices(i, 0) = double(b.schedule.indices[std::size_t(i)]);

  return {
      {"basis_y0.bin", as_column(b.basis.y0)},
      {"basis_modes.bin", b.basis.modes},
      {"basis_eigenvalues.bin", as_column(b.basis.eigenvalues)},
      {"schedule_indices.bin", indices},
      {"schedule_weights.bin", b.schedule.weights},
      {"schedule_mean.bin", as_column(b.schedule.feature_mean)},
      {"schedule_std.bin", as_column(b.schedule.feature_std)},
      {"mlp_w_hidden.bin", b.mlp.w_hidden},
      {"mlp_b_hidden.bin", as_column(b.mlp.b_hidden)},
      {"mlp_w_out.bin", b.mlp.w_out},
      {"mlp_b_out.bin", as_column(b.mlp.b_out)},
      {"mlp_mean.bin", as_column(b.mlp.input_mean)},
      {"mlp_std.bin", as_column(b.mlp.input_std)},
      {"svm_sv.bin", b.svm.support_vectors},
      {"svm_coeffs.bin", as_column(b.svm.dual_coeffs)},
      {"damage_influence.bin", b.damage.influence},
      {"damage_sigma.bin", as_column(b.damage.noise_sigma)},
      {"damage_k0.bin", as_column(Vec(b.damage.k0.k))},
  };
}

json scalar_manifest(const ModelBundle& b) {
  const ActuatorParams& a = b.actuator;
  json j;
  j["version"] = b.version;
  j["seed"] = b.master_seed;
  j["basis"] = {{"n_m", b.basis.n_m}, {"total_energy", b.basis.total_energy}};
  j["schedule"] = {{"epochs", b.schedule.epochs},
                   {"seed", b.schedule.seed},
                   {"hash", schedule_digest(b.schedule).hex()}};
  j["mlp"] = {{"epochs_run", b.mlp.record.epochs_run},
              {"final_mse", b.mlp.record.final_mse},
              {"gradient_at_stop", b.mlp.record.gradient_at_stop},
              {"stop_reason", b.mlp.record.stop_reason}};
  j["svm"] = {{"bias", b.svm.bias},
              {"box_c", b.svm.box_c},
              {"degree", b.svm.kernel.degree},
              {"gamma", b.svm.kernel.gamma},
              {"coef0", b.svm.kernel.coef0}};
  j["damage"] = {{"dt", b.damage.dt},
                 {"cap", b.damage.cap},
                 {"growth_floor", b.damage.growth_floor}};
  j["requirements"] = {{"min_gain_margin_db", b.requirements.min_gain_margin_db},
                       {"min_phase_margin_deg", b.requirements.min_phase_margin_deg},
                       {"min_cutoff_hz", b.requirements.min_cutoff_hz}};
  j["actuator"] = {
      {"resistance", a.resistance},       {"inductance", a.inductance},
      {"kv", a.kv},                       {"inertia", a.inertia},
      {"friction_nom", a.friction_nom},   {"viscous", a.viscous},
      {"gear_ratio", a.gear_ratio},       {"backlash_nom", a.backlash_nom},
      {"endstop", a.endstop},             {"kp_nom", a.kp_nom},
      {"i_sat", a.i_sat},                 {"v_supply", a.v_supply},
      {"load_torque", a.load_torque},     {"current_loop_gain", a.current_loop_gain},
      {"friction_omega_ref", a.friction_omega_ref},
      {"endstop_stiffness", a.endstop_stiffness},
      {"pole_pairs", a.pole_pairs},
      {"envelope_cutoff", a.envelope_cutoff}, {"substeps", a.substeps},
      {"ecc_gain", a.ecc_gain},           {"ripple_amp", a.ripple_amp},
      {"noise_sigma", a.noise_sigma},   {"noise_mult", a.noise_mult}};
  return j;
}

Digest128 bundle_hash_from(const json& scalars,
                           const std::map<std::string, Mat>& mats) {
  json hashed = scalars;
  json artifacts = json::object();
  for (const auto& [name, m] : mats) artifacts[name] = digest_matrix(m).hex();
  hashed["artifacts"] = artifacts;
  std::string s = hashed.dump();
  return digest_bytes(s.data(), s.size());
}

void write_u64_le(std::ofstream& os, std::uint64_t v) {
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = (unsigned char)(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(buf), 8);
}

std::uint64_t read_u64_le(std::ifstream& is) {
  unsigned char buf[8];
  is.read(reinterpret_cast<char*>(buf), 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t(buf[i]) << (8 * i);
  return v;
}

}  // namespace

Digest128 ModelBundle::hash() const {
  return bundle_hash_from(scalar_manifest(*this), artifact_matrices(*this));
}

void ModelBundle::validate() const {
  require(basis.n_m > 0 && basis.n_m <= basis.rank(),
          "bundle: retained mode count out of range");
  require(schedule.count() >= basis.n_m,
          "bundle: fewer schedule points than retained modes");
  for (Index idx : schedule.indices)
    require(idx >= 0 && idx < basis.y0.size(),
            "bundle: schedule index outside the acquisition grid");
  require(mlp.input_size() == basis.n_m,
          "bundle: network input size does not match retained modes");
  require(mlp.output_size() == kNumFaults,
          "bundle: network output size is not the fault dimension");
  require(svm.support_vectors.cols() == kNumFaults,
          "bundle: support vectors have wrong dimension");
  require(y0_hat.values.size() == schedule.count(),
          "bundle: compressed reference length mismatch");
  require(y0_hat.schedule_hash == schedule_digest(schedule),
          "bundle: compressed reference was built from a different schedule");
  damage.validate();
  actuator.validate();
}

void save_bundle(const ModelBundle& bundle, const fs::path& dir) {
  bundle.validate();
  fs::create_directories(dir);

  auto mats = artifact_matrices(bundle);
  for (const auto& [name, m] : mats) save_matrix((dir / name).string(), m);
  save_matrix((dir / "y0_hat.bin").string(), as_column(bundle.y0_hat.values));

  json j = scalar_manifest(bundle);
  json artifacts = json::object();
  for (const auto& [name, m] : mats) artifacts[name] = digest_matrix(m).hex();
  j["artifacts"] = artifacts;
  j["bundle_hash"] = bundle_hash_from(scalar_manifest(bundle), mats).hex();
  j["created"] = bundle.created;

  std::ofstream os(dir / "manifest.json", std::ios::binary);
  require(bool(os), "bundle: cannot write manifest in " + dir.string());
  os << j.dump(2) << "\n";
}

ModelBundle load_bundle(const fs::path& dir) {
  std::ifstream is(dir / "manifest.json", std::ios::binary);
  require(bool(is), "bundle: no manifest in " + dir.string());
  json j = json::parse(is);

  ModelBundle b;
  b.version = j.at("version").get<std::string>();
  b.master_seed = j.at("seed").get<std::uint64_t>();
  b.created = j.value("created", "");

  auto load = [&](const std::string& name) {
    fs::path p = dir / name;
    Mat m = load_matrix(p.string());
    std::string want = j.at("artifacts").at(name).get<std::string>();
    require(digest_matrix(m).hex() == want,
            "bundle: artifact digest mismatch for " + name);
    return m;
  };

  b.basis.y0 = as_vector(load("basis_y0.bin"));
  b.basis.modes = load("basis_modes.bin");
  b.basis.eigenvalues = as_vector(load("basis_eigenvalues.bin"));
  b.basis.n_m = j.at("basis").at("n_m").get<Index>();
  b.basis.total_energy = j.at("basis").at("total_energy").get<double>();

  Mat idx = load("schedule_indices.bin");
  b.schedule.indices.resize(std::size_t(idx.rows()));
  for (Index i = 0; i < idx.rows(); ++i)
    b.schedule.indices[std::size_t(i)] = Index(idx(i, 0));
  b.schedule.weights = load("schedule_weights.bin");
  b.schedule.feature_mean = as_vector(load("schedule_mean.bin"));
  b.schedule.feature_std = as_vector(load("schedule_std.bin"));
  b.schedule.epochs = j.at("schedule").at("epochs").get<int>();
  b.schedule.seed = j.at("schedule").at("seed").get<std::uint64_t>();
  require(schedule_digest(b.schedule).hex() ==
              j.at("schedule").at("hash").get<std::string>(),
          "bundle: schedule hash mismatch");

  b.mlp.w_hidden = load("mlp_w_hidden.bin");
  b.mlp.b_hidden = as_vector(load("mlp_b_hidden.bin"));
  b.mlp.w_out = load("mlp_w_out.bin");
  b.mlp.b_out = as_vector(load("mlp_b_out.bin"));
  b.mlp.input_mean = as_vector(load("mlp_mean.bin"));
  b.mlp.input_std = as_vector(load("mlp_std.bin"));
  b.mlp.record.epochs_run = j.at("mlp").at("epochs_run").get<int>();
  b.mlp.record.final_mse = j.at("mlp").at("final_mse").get<double>();
  b.mlp.record.gradient_at_stop = j.at("mlp").at("gradient_at_stop").get<double>();
  b.mlp.record.stop_reason = j.at("mlp").at("stop_reason").get<std::string>();

  b.svm.support_vectors = load("svm_sv.bin");
  b.svm.dual_coeffs = as_vector(load("svm_coeffs.bin"));
  b.svm.bias = j.at("svm").at("bias").get<double>();
  b.svm.box_c = j.at("svm").at("box_c").get<double>();
  b.svm.kernel.degree = j.at("svm").at("degree").get<int>();
  b.svm.kernel.gamma = j.at("svm").at("gamma").get<double>();
  b.svm.kernel.coef0 = j.at("svm").at("coef0").get<double>();

  b.damage.influence = load("damage_influence.bin");
  b.damage.noise_sigma = as_vector(load("damage_sigma.bin"));
  b.damage.k0.k = as_vector(load("damage_k0.bin"));
  b.damage.dt = j.at("damage").at("dt").get<double>();
  b.damage.cap = j.at("damage").at("cap").get<double>();
  b.damage.growth_floor = j.at("damage").at("growth_floor").get<double>();

  const json& r = j.at("requirements");
  b.requirements.min_gain_margin_db = r.at("min_gain_margin_db").get<double>();
  b.requirements.min_phase_margin_deg = r.at("min_phase_margin_deg").get<double>();
  b.requirements.min_cutoff_hz = r.at("min_cutoff_hz").get<double>();

  const json& a = j.at("actuator");
  ActuatorParams& p = b.actuator;
  p.resistance = a.at("resistance").get<double>();
  p.inductance = a.at("inductance").get<double>();
  p.kv = a.at("kv").get<double>();
  p.inertia = a.at("inertia").get<double>();
  p.friction_nom = a.at("friction_nom").get<double>();
  p.viscous = a.at("viscous").get<double>();
  p.gear_ratio = a.at("gear_ratio").get<double>();
  p.backlash_nom = a.at("backlash_nom").get<double>();
  p.endstop = a.at("endstop").get<double>();
  p.kp_nom = a.at("kp_nom").get<double>();
  p.i_sat = a.at("i_sat").get<double>();
  p.v_supply = a.at("v_supply").get<double>();
  p.load_torque = a.at("load_torque").get<double>();
  p.current_loop_gain = a.at("current_loop_gain").get<double>();
  p.friction_omega_ref = a.at("friction_omega_ref").get<double>();
  p.endstop_stiffness = a.at("endstop_stiffness").get<double>();
  p.pole_pairs = a.at("pole_pairs").get<double>();
  p.envelope_cutoff = a.at("envelope_cutoff").get<double>();
  p.substeps = a.at("substeps").get<int>();
  p.ecc_gain = a.at("ecc_gain").get<double>();
  p.ripple_amp = a.at("ripple_amp").get<double>();
  p.noise_sigma = a.at("noise_sigma").get<double>();
  p.noise_mult = a.at("noise_mult").get<double>();

  b.y0_hat.values = as_vector(load_matrix((dir / "y0_hat.bin").string()));
  b.y0_hat.schedule_hash = schedule_digest(b.schedule);

  require(b.hash().hex() == j.at("bundle_hash").get<std::string>(),
          "bundle: stored bundle hash does not match the artifacts");
  b.validate();
  return b;
}

void save_compressed(const CompressedSignal& cs, const Digest128& bundle_hash,
                     const fs::path& file) {
  std::ofstream os(file, std::ios::binary);
  require(bool(os), "cannot write " + file.string());
  write_u64_le(os, bundle_hash.lo);
  write_u64_le(os, bundle_hash.hi);
  for (Index i = 0; i < cs.values.size(); ++i) {
    double v = cs.values[i];
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    write_u64_le(os, bits);
  }
  require(bool(os), "short write to " + file.string());
}

CompressedSignal load_compressed(const ModelBundle& bundle,
                                 const fs::path& file) {
  std::ifstream is(file, std::ios::binary);
  require(bool(is), "cannot read " + file.string());
  Digest128 got{read_u64_le(is), read_u64_le(is)};
  require(bool(is), "truncated compressed signal " + file.string());
  require(got == bundle.hash(),
          "compressed signal was produced with a different bundle");

  Index n_w = bundle.schedule.count();
  CompressedSignal cs;
  cs.values.resize(n_w);
  for (Index i = 0; i < n_w; ++i) {
    std::uint64_t bits = read_u64_le(is);
    double v;
    std::memcpy(&v, &bits, 8);
    cs.values[i] = v;
  }
  require(bool(is), "truncated compressed signal " + file.string());
  is.peek();
  require(is.eof(), "compressed signal longer than the schedule");
  cs.schedule_hash = schedule_digest(bundle.schedule);
  return cs;
}

}  // namespace phm
