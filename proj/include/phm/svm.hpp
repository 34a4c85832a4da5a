#pragma once

#include "phm/types.hpp"

namespace phm {

/// Polynomial kernel (gamma x.z + coef0)^degree.
struct KernelSpec {
  int degree = 3;
  double gamma = 1.0 / kNumFaults;
  double coef0 = 1.0;
};

/// Soft-margin binary SVM; class map +1 healthy, -1 faulty.
struct SvmModel {
  Mat support_vectors;  // n_sv x n_k
  Vec dual_coeffs;      // sigma_i * a_i, |.| <= C
  double bias = 0.0;
  KernelSpec kernel;
  double box_c = 10.0;

  Index count() const { return support_vectors.rows(); }
};

double kernel_eval(const KernelSpec& k, const Vec& x, const Vec& z);

/// Trains the soft-margin dual by sequential pairwise optimization (most
/// violating pair) to the given KKT tolerance; only support vectors are
/// stored.
SvmModel train_svm(const Mat& K, const std::vector<HealthLabel>& phi,
                   const KernelSpec& kernel, double box_c,
                   double kkt_tol = 1e-3);

double svm_score(const SvmModel& model, const FaultVector& k);

/// Healthy iff score >= 0 (ties map to healthy).
HealthLabel assess_surrogate(const SvmModel& model, const FaultVector& k);

/// Collapsed form of a degree <= 3 polynomial-kernel expansion: the score is
/// a fixed cubic in k, so evaluation cost is independent of the support
/// vector count. This is what keeps the RUL propagation (one surrogate call
/// per time step, thousands of steps per Monte-Carlo run) inside the online
/// compute budget. Falls back to the direct expansion for higher degrees.
class SvmScorer {
 public:
  explicit SvmScorer(const SvmModel& model);
  double operator()(const FaultVector& k) const;
  HealthLabel label(const FaultVector& k) const {
    return operator()(k) >= 0.0 ? HealthLabel::healthy : HealthLabel::faulty;
  }

 private:
  using KVec = Eigen::Matrix<double, kNumFaults, 1>;
  using KMat = Eigen::Matrix<double, kNumFaults, kNumFaults>;
  const SvmModel* model_;
  bool collapsed_ = false;
  double c0_ = 0.0;
  KVec c1_;                 // linear coefficients
  KMat c2_;                 // quadratic form
  std::vector<KMat> c3_;    // cubic tensor, one slab per k component
};

}  // namespace phm
