#pragma once

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "phm/common.hpp"

namespace phm::testutil {

// One-sample Kolmogorov-Smirnov statistic against U(0,1).
inline double ks_uniform(std::vector<double> x) {
  std::sort(x.begin(), x.end());
  double d = 0.0;
  const double n = double(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    d = std::max(d, std::abs(x[i] - double(i) / n));
    d = std::max(d, std::abs(x[i] - double(i + 1) / n));
  }
  return d;
}

// Asymptotic 1%-level critical value of the KS statistic.
inline double ks_crit_1pct(std::size_t n) {
  return 1.628 / std::sqrt(double(n));
}

// exact elementwise equality for Eigen vectors/matrices
template <class A, class B>
bool same_bits(const A& a, const B& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (Eigen::Index i = 0; i < a.size(); ++i)
    if (a(i) != b(i)) return false;
  return true;
}

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    path = std::filesystem::temp_directory_path() /
           ("phm-test-" + tag + "-" + std::to_string(getpid()));
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
};

}  // namespace phm::testutil
