#include "phm/matrix_io.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

namespace phm {

namespace {
constexpr char kMagic[8] = {'P', 'H', 'M', 'M', 'A', 'T', '1', '\0'};
constexpr std::uint64_t kFnvOffset2 = 0x84222325cbf29ce4ull;
}

std::string Digest128::hex() const {
  char buf[33];
  std::snprintf(buf, sizeof(buf), "%016llx%016llx",
                static_cast<unsigned long long>(hi),
                static_cast<unsigned long long>(lo));
  return buf;
}

Digest128 digest_bytes(const void* data, std::size_t n) {
  Digest128 d;
  d.lo = fnv1a64(data, n, kFnvOffset);
  d.hi = fnv1a64(data, n, kFnvOffset2);
  return d;
}

Digest128 digest_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  require(f.good(), "cannot open: " + path);
  Digest128 d{kFnvOffset, kFnvOffset2};
  char buf[1 << 16];
  while (f) {
    f.read(buf, sizeof(buf));
    auto n = std::size_t(f.gcount());
    d.lo = fnv1a64(buf, n, d.lo);
    d.hi = fnv1a64(buf, n, d.hi);
  }
  return d;
}

Digest128 parse_digest(const std::string& hex) {
  require(hex.size() == 32, "digest must be 32 hex chars");
  Digest128 d;
  d.hi = std::stoull(hex.substr(0, 16), nullptr, 16);
  d.lo = std::stoull(hex.substr(16), nullptr, 16);
  return d;
}

void save_matrix(const std::string& path, const Mat& m) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  require(f.good(), "cannot open for writing: " + path);
  f.write(kMagic, 8);
  std::int64_t shape[2] = {m.rows(), m.cols()};
  f.write(reinterpret_cast<const char*>(shape), sizeof(shape));
  // row-major payload
  std::vector<double> row(std::size_t(m.cols()));
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) row[std::size_t(j)] = m(i, j);
    f.write(reinterpret_cast<const char*>(row.data()),
            std::streamsize(row.size() * sizeof(double)));
  }
  require(f.good(), "write failed: " + path);
}

Mat load_matrix(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  require(f.good(), "cannot open: " + path);
  char magic[8];
  f.read(magic, 8);
  require(f.good() && std::memcmp(magic, kMagic, 8) == 0,
          "bad matrix file magic: " + path);
  std::int64_t shape[2];
  f.read(reinterpret_cast<char*>(shape), sizeof(shape));
  require(f.good() && shape[0] >= 0 && shape[1] >= 0,
          "bad matrix header: " + path);
  Mat m(shape[0], shape[1]);
  std::vector<double> row(static_cast<std::size_t>(shape[1]));
  for (Index i = 0; i < m.rows(); ++i) {
    f.read(reinterpret_cast<char*>(row.data()),
           std::streamsize(row.size() * sizeof(double)));
    require(f.good(), "truncated matrix file: " + path);
    for (Index j = 0; j < m.cols(); ++j) m(i, j) = row[std::size_t(j)];
  }
  return m;
}

void save_matrix_csv(const std::string& path, const Mat& m) {
  std::ofstream f(path, std::ios::trunc);
  require(f.good(), "cannot open for writing: " + path);
  f.precision(17);
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) f << ',';
      f << m(i, j);
    }
    f << '\n';
  }
}

Mat load_matrix_csv(const std::string& path) {
  std::ifstream f(path);
  require(f.good(), "cannot open: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (!rows.empty())
      require(row.size() == rows.front().size(), "ragged CSV: " + path);
    rows.push_back(std::move(row));
  }
  Mat m(Index(rows.size()), rows.empty() ? 0 : Index(rows.front().size()));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j)
      m(i, j) = rows[std::size_t(i)][std::size_t(j)];
  return m;
}

}  // namespace phm
