#include "phm/sampling.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>

#include "phm/matrix_io.hpp"

#include "json.hpp"

namespace phm {

DesignMatrix latin_hypercube(Index n_s, Index n_k, std::uint64_t seed) {
  require(n_s >= 2, "latin_hypercube: n_s must be >= 2");
  require(n_k >= 1, "latin_hypercube: n_k must be >= 1");
  Rng rng(seed);
  DesignMatrix d;
  d.entries = Mat(n_s, n_k);
  std::vector<Index> perm(static_cast<std::size_t>(n_s));
  for (Index j = 0; j < n_k; ++j) {
    std::iota(perm.begin(), perm.end(), Index(0));
    for (Index i = n_s - 1; i > 0; --i)
      std::swap(perm[std::size_t(i)], perm[rng.integer(std::uint64_t(i) + 1)]);
    for (Index i = 0; i < n_s; ++i)
      d.entries(i, j) = (double(perm[std::size_t(i)]) + rng.uniform()) / double(n_s);
  }
  return d;
}

DesignMatrix importance_rescale(const DesignMatrix& j,
                                const std::set<int>& exempt) {
  // The exponent equals the number of rescaled columns: the max of p iid
  // U(0,1)^p variables is itself U(0,1), which is the distributional goal of
  // the rescaling. With no exemptions this is the column count n_k.
  Index rescaled = 0;
  for (Index c = 0; c < j.cols(); ++c)
    if (!exempt.count(int(c))) ++rescaled;
  require(rescaled >= 1, "importance_rescale: every column is exempt");
  const double power = double(rescaled);
  DesignMatrix k;
  k.entries = j.entries;
  k.exempt = exempt;
  for (Index c = 0; c < k.cols(); ++c) {
    if (exempt.count(int(c))) continue;
    for (Index r = 0; r < k.rows(); ++r) {
      double v = k.entries(r, c);
      require(v >= 0.0 && v <= 1.0, "importance_rescale: entry outside [0,1]");
      k.entries(r, c) = std::pow(v, power);
    }
  }
  return k;
}

FaultVector fault_from_row(const DesignMatrix& k, Index row) {
  require(k.cols() == kNumFaults, "design matrix must have 8 columns");
  FaultVector f;
  for (int i = 0; i < kNumFaults; ++i) f[i] = k.entries(row, i);
  return f;
}

SnapshotDataset build_dataset(const DesignMatrix& K, const CommandProfile& cmd,
                              const ActuatorParams& params,
                              const Assessor& assessor, std::uint64_t seed) {
  const Index n_s = K.rows();
  require(n_s >= 1, "empty design matrix");

  SnapshotDataset ds;
  ds.seed = seed;
  std::vector<Vec> cols;
  std::vector<Index> kept;
  cols.reserve(std::size_t(n_s));
  for (Index r = 0; r < n_s; ++r) {
    FaultVector f = fault_from_row(K, r);
    try {
      SignalSnapshot s = simulate_response(
          f, cmd, params, Tier::truth,
          substream_seed(seed, "sim-noise", std::uint64_t(r)));
      cols.push_back(std::move(s.y));
      kept.push_back(r);
    } catch (const NumericalError& e) {
      ds.dropped.push_back(r);
      std::cerr << "dataset row " << r << " dropped: " << e.what() << "\n";
    }
  }
  require(!cols.empty(), "all dataset rows failed to simulate");

  ds.K = Mat(Index(kept.size()), K.cols());
  ds.Y = Mat(cols.front().size(), Index(kept.size()));
  ds.phi.reserve(kept.size());
  for (std::size_t i = 0; i < kept.size(); ++i) {
    ds.K.row(Index(i)) = K.entries.row(kept[i]);
    ds.Y.col(Index(i)) = cols[i];
    ds.phi.push_back(assessor(fault_from_row(K, kept[i])));
  }
  return ds;
}

void save_dataset(const std::string& dir, const SnapshotDataset& ds) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  save_matrix(dir + "/K.bin", ds.K);
  save_matrix(dir + "/Y.bin", ds.Y);
  Mat phi(1, Index(ds.phi.size()));
  for (Index i = 0; i < phi.cols(); ++i)
    phi(0, i) = ds.phi[std::size_t(i)] == HealthLabel::healthy ? 1.0 : -1.0;
  save_matrix(dir + "/Phi.bin", phi);

  nlohmann::json manifest;
  manifest["seed"] = ds.seed;
  manifest["n_s"] = ds.K.rows();
  manifest["n_e"] = ds.Y.rows();
  manifest["config_hash"] = ds.config_hash;
  manifest["dropped_rows"] = ds.dropped;
  std::ofstream(dir + "/manifest.json") << manifest.dump(2) << "\n";
}

SnapshotDataset load_dataset(const std::string& dir) {
  SnapshotDataset ds;
  ds.K = load_matrix(dir + "/K.bin");
  ds.Y = load_matrix(dir + "/Y.bin");
  Mat phi = load_matrix(dir + "/Phi.bin");
  require(phi.rows() == 1 && phi.cols() == ds.K.rows() &&
              ds.Y.cols() == ds.K.rows(),
          "inconsistent dataset shapes in " + dir);
  for (Index i = 0; i < phi.cols(); ++i)
    ds.phi.push_back(phi(0, i) > 0 ? HealthLabel::healthy : HealthLabel::faulty);

  std::ifstream mf(dir + "/manifest.json");
  if (mf.good()) {
    nlohmann::json manifest = nlohmann::json::parse(mf);
    ds.seed = manifest.value("seed", std::uint64_t(0));
    ds.config_hash = manifest.value("config_hash", std::string());
  }
  return ds;
}

}  // namespace phm
