#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <Eigen/SVD>

#include "doctest.h"
#include "phm/pod.hpp"
#include "test_util.hpp"

using namespace phm;

namespace {

Mat random_matrix(Index rows, Index cols, std::uint64_t seed) {
  Rng rng(seed);
  Mat m(rows, cols);
  for (Index c = 0; c < cols; ++c)
    for (Index r = 0; r < rows; ++r) m(r, c) = rng.gaussian();
  return m;
}

}  // namespace

TEST_CASE("rank-1 snapshots yield one mode along the deviation") {
  Vec y0 = Vec::Zero(20);
  Vec c = Vec::LinSpaced(20, 0.0, 1.0);
  Mat Y(20, 2);
  Y.col(0) = c;
  Y.col(1) = c;
  PodBasis b = compute_pod(Y, y0);
  CHECK(b.rank() == 1);
  Vec dir = (c - y0).normalized();
  CHECK(std::abs(std::abs(b.modes.col(0).dot(dir)) - 1.0) < 1e-12);
  CHECK(energy_fraction(b, 1) == doctest::Approx(1.0));
}

TEST_CASE("modes match an independent SVD oracle") {
  Mat Y = random_matrix(50, 10, 3);
  Vec y0 = random_matrix(50, 1, 4).col(0);
  PodBasis b = compute_pod(Y, y0);

  Mat Yc = Y.colwise() - y0;
  Eigen::JacobiSVD<Mat> svd(Yc, Eigen::ComputeThinU);
  REQUIRE(b.rank() == 10);
  for (Index i = 0; i < b.rank(); ++i) {
    double lam = svd.singularValues()[i] * svd.singularValues()[i] / 10.0;
    CHECK(b.eigenvalues[i] == doctest::Approx(lam).epsilon(1e-8));
    CHECK(std::abs(std::abs(b.modes.col(i).dot(svd.matrixU().col(i))) - 1.0) <
          1e-8);
  }
  CHECK(b.total_energy ==
        doctest::Approx(Yc.squaredNorm() / 10.0).epsilon(1e-8));
}

TEST_CASE("modes are orthonormal to 1e-10") {
  Mat Y = random_matrix(60, 12, 8);
  PodBasis b = compute_pod(Y, Vec::Zero(60));
  Mat g = b.modes.transpose() * b.modes;
  CHECK((g - Mat::Identity(b.rank(), b.rank())).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("full-rank reconstruction is exact") {
  Mat Y = random_matrix(40, 6, 5);
  Vec y0 = Y.rowwise().mean();
  PodBasis b = compute_pod(Y, y0);
  for (Index c = 0; c < Y.cols(); ++c) {
    Vec alpha = b.modes.transpose() * (Y.col(c) - y0);
    Vec rec = y0 + b.modes * alpha;
    CHECK((rec - Y.col(c)).norm() <= 1e-8 * Y.col(c).norm());
  }
}

TEST_CASE("energy fraction is monotone and reaches one") {
  Mat Y = random_matrix(30, 8, 6);
  PodBasis b = compute_pod(Y, Vec::Zero(30));
  double prev = 0.0;
  for (Index m = 1; m <= b.rank(); ++m) {
    double e = energy_fraction(b, m);
    CHECK(e >= prev);
    prev = e;
  }
  CHECK(prev == doctest::Approx(1.0).epsilon(1e-10));
  CHECK_THROWS_AS(energy_fraction(b, 0), ValidationError);
  CHECK_THROWS_AS(energy_fraction(b, b.rank() + 1), ValidationError);
}

TEST_CASE("projection basics") {
  Mat Y = random_matrix(25, 7, 9);
  Vec y0 = Y.rowwise().mean();
  PodBasis b = compute_pod(Y, y0);
  REQUIRE(b.n_m >= 2);

  Vec a0 = project_coefficients(y0, b);
  CHECK(a0.cwiseAbs().maxCoeff() < 1e-12);

  Vec y = y0 + 3.0 * b.modes.col(1);
  Vec a = project_coefficients(y, b);
  CHECK(a[1] == doctest::Approx(3.0).epsilon(1e-12));
  a[1] = 0.0;
  // off-mode leakage is bounded by the Gram-path orthonormality error
  CHECK(a.cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("truncated projection is the least-squares optimum") {
  Mat Y = random_matrix(40, 10, 12);
  Vec y0 = Y.rowwise().mean();
  PodBasis b = compute_pod(Y, y0);
  b.n_m = 4;
  Vec y = Y.col(3);
  Vec alpha = project_coefficients(y, b);
  Vec resid = (y - y0) - b.modes.leftCols(4) * alpha;
  CHECK((b.modes.leftCols(4).transpose() * resid).cwiseAbs().maxCoeff() < 1e-8);

  // total truncated training error no worse than 10 random orthonormal bases
  double err_pod = 0.0;
  for (Index c = 0; c < Y.cols(); ++c) {
    Vec d = Y.col(c) - y0;
    err_pod += (d - b.modes.leftCols(4) * (b.modes.leftCols(4).transpose() * d))
                   .squaredNorm();
  }
  for (int trial = 0; trial < 10; ++trial) {
    Mat q = random_matrix(40, 4, 100 + std::uint64_t(trial));
    Mat base = Eigen::HouseholderQR<Mat>(q).householderQ() * Mat::Identity(40, 4);
    double err = 0.0;
    for (Index c = 0; c < Y.cols(); ++c) {
      Vec d = Y.col(c) - y0;
      err += (d - base * (base.transpose() * d)).squaredNorm();
    }
    CHECK(err_pod <= err + 1e-9);
  }
}

TEST_CASE("rank-deficient snapshots truncate at numerical rank") {
  Mat Y = random_matrix(30, 3, 17);
  Mat wide(30, 6);
  wide << Y, Y;  // duplicated columns, rank 3 after centering against zero
  PodBasis b = compute_pod(wide, Vec::Zero(30));
  // the Gram path resolves rank to ~sqrt(eps); everything past the third
  // mode must carry a negligible share of the energy
  REQUIRE(b.rank() >= 3);
  CHECK(energy_fraction(b, 3) == doctest::Approx(1.0).epsilon(1e-12));
  if (b.rank() > 3)
    CHECK(b.eigenvalues.tail(b.rank() - 3).sum() < 1e-12 * b.total_energy);
}

TEST_CASE("lanczos spectrum agrees with the dense path") {
  Mat Y = random_matrix(200, 40, 21);
  Vec y0 = Y.rowwise().mean();
  PodBasis b = compute_pod(Y, y0);
  PodSpectrum sp = pod_spectrum(Y, y0, 5);
  REQUIRE(sp.top_eigenvalues.size() == 5);
  for (Index i = 0; i < 5; ++i)
    CHECK(sp.top_eigenvalues[i] ==
          doctest::Approx(b.eigenvalues[i]).epsilon(1e-8));
  CHECK(sp.total_energy == doctest::Approx(b.total_energy).epsilon(1e-10));
}

TEST_CASE("pod input validation") {
  CHECK_THROWS_AS(compute_pod(Mat(10, 1), Vec::Zero(10)), ValidationError);
  CHECK_THROWS_AS(compute_pod(Mat(10, 3), Vec::Zero(9)), ValidationError);
}
