#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace phm {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Eigen::Index;

/// Thrown for malformed arguments, configs or artifacts (CLI exit code 2).
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Thrown when a numerical procedure breaks down (CLI exit code 3).
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// --- hashing ---------------------------------------------------------------

inline constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ull;
inline constexpr std::uint64_t kFnvPrime = 0x100000001b3ull;

inline std::uint64_t fnv1a64(const void* data, std::size_t n,
                             std::uint64_t h = kFnvOffset) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= kFnvPrime;
  }
  return h;
}

inline std::uint64_t fnv1a64(std::string_view s, std::uint64_t h = kFnvOffset) {
  return fnv1a64(s.data(), s.size(), h);
}

/// 128-bit digest as two independent 64-bit FNV streams (second stream uses a
/// different offset basis). Not cryptographic, used for artifact integrity.
struct Digest128 {
  std::uint64_t lo = 0, hi = 0;
  bool operator==(const Digest128&) const = default;
  std::string hex() const;
};

Digest128 digest_bytes(const void* data, std::size_t n);
Digest128 digest_file(const std::string& path);
Digest128 parse_digest(const std::string& hex);

inline Digest128 digest_matrix(const Mat& m) {
  std::uint64_t shape[2] = {std::uint64_t(m.rows()), std::uint64_t(m.cols())};
  Digest128 d = digest_bytes(shape, sizeof(shape));
  // row-major traversal so the digest matches the serialized form
  Digest128 body{kFnvOffset, 0x84222325cbf29ce4ull};
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) {
      double v = m(i, j);
      body.lo = fnv1a64(&v, sizeof(v), body.lo);
      body.hi = fnv1a64(&v, sizeof(v), body.hi);
    }
  d.lo ^= body.lo;
  d.hi ^= body.hi;
  return d;
}

// --- randomness ------------------------------------------------------------

/// Seed for a named sub-stream of a master seed; keeps all stages of the
/// pipeline reproducible from one seed while decoupling their draws.
inline std::uint64_t substream_seed(std::uint64_t master, std::string_view name,
                                    std::uint64_t index = 0) {
  std::uint64_t h = fnv1a64(&master, sizeof(master));
  h = fnv1a64(name, h);
  h = fnv1a64(&index, sizeof(index), h);
  return h;
}

/// mt19937_64 with portable uniform/gaussian draws (Box-Muller, fixed op
/// order) so results do not depend on libstdc++ distribution internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform() {  // in [0, 1)
    return double(eng_() >> 11) * 0x1.0p-53;
  }

  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1, u2;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  std::uint64_t integer(std::uint64_t bound) {  // in [0, bound)
    // multiply-shift; bias negligible for bound << 2^64
    return std::uint64_t((__uint128_t(eng_()) * bound) >> 64);
  }

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw ValidationError(msg);
}

}  // namespace phm
