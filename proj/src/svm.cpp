#include "phm/svm.hpp"

#include <iostream>

namespace phm {

double kernel_eval(const KernelSpec& k, const Vec& x, const Vec& z) {
  return std::pow(k.gamma * x.dot(z) + k.coef0, k.degree);
}

SvmModel train_svm(const Mat& K, const std::vector<HealthLabel>& phi,
                   const KernelSpec& kernel, double box_c, double kkt_tol) {
  const Index n = K.rows();
  require(n >= 2 && phi.size() == std::size_t(n),
          "train_svm: need >= 2 labeled points");
  require(box_c > 0.0 && kkt_tol > 0.0, "train_svm: bad C or tolerance");

  Vec y(n);
  for (Index i = 0; i < n; ++i)
    y[i] = phi[std::size_t(i)] == HealthLabel::healthy ? 1.0 : -1.0;
  require(y.maxCoeff() > 0 && y.minCoeff() < 0,
          "train_svm: both classes must be present");

  // dense kernel matrix; training sizes here are a few thousand points
  Mat Q(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j <= i; ++j) {
      double v = kernel_eval(kernel, K.row(i).transpose(), K.row(j).transpose());
      Q(i, j) = Q(j, i) = v;
    }
  }

  Vec alpha = Vec::Zero(n);
  Vec grad = Vec::Constant(n, -1.0);  // gradient of 1/2 a'Qa - e'a at a = 0
  const double C = box_c;

  const long max_iter = 1000 * std::max<long>(n, 1000);
  long iter = 0;
  double m_up = 0.0, m_low = 0.0;
  for (; iter < max_iter; ++iter) {
    // most violating pair
    Index i = -1, j = -1;
    m_up = -std::numeric_limits<double>::infinity();
    m_low = std::numeric_limits<double>::infinity();
    for (Index t = 0; t < n; ++t) {
      double v = -y[t] * grad[t];
      bool in_up = (y[t] > 0 && alpha[t] < C) || (y[t] < 0 && alpha[t] > 0);
      bool in_low = (y[t] > 0 && alpha[t] > 0) || (y[t] < 0 && alpha[t] < C);
      if (in_up && v > m_up) {
        m_up = v;
        i = t;
      }
      if (in_low && v < m_low) {
        m_low = v;
        j = t;
      }
    }
    if (i < 0 || j < 0 || m_up - m_low < kkt_tol) break;

    double quad = std::max(Q(i, i) + Q(j, j) - 2.0 * Q(i, j), 1e-12);
    double t_step = (m_up - m_low) / quad;
    // box limits along the feasible direction
    double t_hi = std::min(y[i] > 0 ? C - alpha[i] : alpha[i],
                           y[j] > 0 ? alpha[j] : C - alpha[j]);
    t_step = std::min(t_step, t_hi);
    // feasible direction d_i = y_i, d_j = -y_j keeps sum(y.*alpha) constant
    alpha[i] = std::clamp(alpha[i] + y[i] * t_step, 0.0, C);
    alpha[j] = std::clamp(alpha[j] - y[j] * t_step, 0.0, C);

    grad += t_step * (y.array() * (Q.col(i) - Q.col(j)).array()).matrix();
  }
  if (iter == max_iter)
    std::cerr << "train_svm: iteration cap reached, gap = " << m_up - m_low
              << "\n";

  // bias from free support vectors, midpoint fallback otherwise
  double b_acc = 0.0;
  Index b_count = 0;
  for (Index t = 0; t < n; ++t)
    if (alpha[t] > 1e-8 * C && alpha[t] < C * (1.0 - 1e-8)) {
      b_acc += -y[t] * grad[t];
      ++b_count;
    }
  double bias = b_count > 0 ? b_acc / double(b_count) : 0.5 * (m_up + m_low);

  SvmModel model;
  model.kernel = kernel;
  model.box_c = C;
  model.bias = bias;
  std::vector<Index> sv;
  for (Index t = 0; t < n; ++t)
    if (alpha[t] > 1e-10 * C) sv.push_back(t);
  model.support_vectors = Mat(Index(sv.size()), K.cols());
  model.dual_coeffs = Vec(Index(sv.size()));
  for (Index s = 0; s < Index(sv.size()); ++s) {
    model.support_vectors.row(s) = K.row(sv[std::size_t(s)]);
    model.dual_coeffs[s] = alpha[sv[std::size_t(s)]] * y[sv[std::size_t(s)]];
  }
  return model;
}

double svm_score(const SvmModel& model, const FaultVector& k) {
  Vec x = k.k;
  double acc = model.bias;
  for (Index s = 0; s < model.count(); ++s)
    acc += model.dual_coeffs[s] *
           kernel_eval(model.kernel, model.support_vectors.row(s).transpose(), x);
  return acc;
}

HealthLabel assess_surrogate(const SvmModel& model, const FaultVector& k) {
  return svm_score(model, k) >= 0.0 ? HealthLabel::healthy : HealthLabel::faulty;
}

SvmScorer::SvmScorer(const SvmModel& model) : model_(&model) {
  const int d = model.kernel.degree;
  if (d < 1 || d > 3 || model.support_vectors.cols() != kNumFaults)
    return;  // fall back to the direct expansion
  c1_ = KVec::Zero();
  c2_ = KMat::Zero();
  if (d == 3) c3_.assign(std::size_t(kNumFaults), KMat::Zero());
  c0_ = model.bias;
  const double a = model.kernel.coef0;
  for (Index s = 0; s < model.count(); ++s) {
    KVec w = model.kernel.gamma * model.support_vectors.row(s).transpose();
    double c = model.dual_coeffs[s];
    switch (d) {
      case 1:
        c0_ += c * a;
        c1_ += c * w;
        break;
      case 2:
        c0_ += c * a * a;
        c1_ += 2.0 * c * a * w;
        c2_ += c * w * w.transpose();
        break;
      case 3:
        c0_ += c * a * a * a;
        c1_ += 3.0 * c * a * a * w;
        c2_ += 3.0 * c * a * w * w.transpose();
        for (int m = 0; m < kNumFaults; ++m)
          c3_[std::size_t(m)] += (c * w[m]) * w * w.transpose();
        break;
    }
  }
  collapsed_ = true;
}

double SvmScorer::operator()(const FaultVector& k) const {
  if (!collapsed_) return svm_score(*model_, k);
  const auto& x = k.k;
  double acc = c0_ + c1_.dot(x) + x.dot(c2_ * x);
  if (!c3_.empty()) {
    KMat m = x[0] * c3_[0];
    for (int j = 1; j < kNumFaults; ++j) m += x[j] * c3_[std::size_t(j)];
    acc += x.dot(m * x);
  }
  return acc;
}

}  // namespace phm
