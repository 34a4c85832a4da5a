#include "phm/mlp.hpp"

#include <Eigen/Cholesky>
#include <iostream>

namespace phm {

namespace {

Vec standardized(const MlpModel& m, const Vec& alpha) {
  return (alpha - m.input_mean).cwiseQuotient(m.input_std);
}

struct ParamLayout {
  Index n_m, n_h, n_k;
  Index wh0, bh0, wo0, bo0, total;
  ParamLayout(Index m, Index h, Index k) : n_m(m), n_h(h), n_k(k) {
    wh0 = 0;
    bh0 = wh0 + n_h * n_m;
    wo0 = bh0 + n_h;
    bo0 = wo0 + n_k * n_h;
    total = bo0 + n_k;
  }
};

void unpack(const Vec& p, const ParamLayout& L, MlpModel& m) {
  for (Index j = 0; j < L.n_h; ++j)
    for (Index l = 0; l < L.n_m; ++l) m.w_hidden(j, l) = p[L.wh0 + j * L.n_m + l];
  m.b_hidden = p.segment(L.bh0, L.n_h);
  for (Index i = 0; i < L.n_k; ++i)
    for (Index j = 0; j < L.n_h; ++j) m.w_out(i, j) = p[L.wo0 + i * L.n_h + j];
  m.b_out = p.segment(L.bo0, L.n_k);
}

ParamLayout layout_of(const MlpModel& m) {
  return ParamLayout(m.input_size(), m.hidden_size(), m.output_size());
}

}  // namespace

Index mlp_parameter_count(const MlpModel& model) {
  return layout_of(model).total;
}

Vec mlp_pack(const MlpModel& model) {
  ParamLayout L = layout_of(model);
  Vec p(L.total);
  for (Index j = 0; j < L.n_h; ++j)
    for (Index l = 0; l < L.n_m; ++l)
      p[L.wh0 + j * L.n_m + l] = model.w_hidden(j, l);
  p.segment(L.bh0, L.n_h) = model.b_hidden;
  for (Index i = 0; i < L.n_k; ++i)
    for (Index j = 0; j < L.n_h; ++j)
      p[L.wo0 + i * L.n_h + j] = model.w_out(i, j);
  p.segment(L.bo0, L.n_k) = model.b_out;
  return p;
}

void mlp_unpack(const Vec& params, MlpModel& model) {
  ParamLayout L = layout_of(model);
  require(params.size() == L.total, "mlp_unpack: parameter count mismatch");
  unpack(params, L, model);
}

void mlp_residuals(const MlpModel& model, const Mat& inputs,
                   const Mat& targets, Vec& residuals, Mat* jacobian) {
  const Index n_s = inputs.rows();
  const Index n_k = targets.cols();
  require(targets.rows() == n_s, "mlp_residuals: input/target count mismatch");
  require(inputs.cols() == model.input_size(),
          "mlp_residuals: input width mismatch");
  ParamLayout L = layout_of(model);
  residuals.resize(n_s * n_k);
  if (jacobian) jacobian->resize(n_s * n_k, L.total);
  for (Index s = 0; s < n_s; ++s) {
    Vec x = standardized(model, inputs.row(s).transpose());
    Vec z = model.w_hidden * x + model.b_hidden;
    Vec h = z.unaryExpr([](double v) { return tansig(v); });
    Vec o = model.w_out * h + model.b_out;
    for (Index i = 0; i < n_k; ++i) {
      Index row = s * n_k + i;
      residuals[row] = o[i] - targets(s, i);
      if (jacobian) {
        auto Jr = jacobian->row(row);
        Jr.setZero();
        for (Index j = 0; j < L.n_h; ++j) {
          double g = model.w_out(i, j) * (1.0 - h[j] * h[j]);
          for (Index l = 0; l < L.n_m; ++l)
            Jr[L.wh0 + j * L.n_m + l] = g * x[l];
          Jr[L.bh0 + j] = g;
          Jr[L.wo0 + i * L.n_h + j] = h[j];
        }
        Jr[L.bo0 + i] = 1.0;
      }
    }
  }
}

Vec mlp_forward_linear(const MlpModel& model, const Vec& alpha) {
  require(alpha.size() == model.input_size(), "mlp: input length mismatch");
  require(alpha.allFinite(), "mlp: non-finite input");
  Vec z = model.w_hidden * standardized(model, alpha) + model.b_hidden;
  Vec h = z.unaryExpr([](double x) { return tansig(x); });
  return model.w_out * h + model.b_out;
}

FaultVector mlp_forward(const MlpModel& model, const Vec& alpha) {
  Vec o = mlp_forward_linear(model, alpha);
  require(o.size() == kNumFaults, "mlp: output size is not a fault vector");
  FaultVector k;
  for (int i = 0; i < kNumFaults; ++i) k[i] = std::clamp(o[i], 0.0, 1.0);
  return k;
}

MlpModel train_mlp(const Mat& inputs, const Mat& targets, Index n_h,
                   const MlpStop& stop, std::uint64_t seed) {
  const Index n_s = inputs.rows();
  const Index n_m = inputs.cols();
  const Index n_k = targets.cols();
  require(targets.rows() == n_s, "train_mlp: input/target count mismatch");
  require(n_h >= 1, "train_mlp: need at least one hidden neuron");
  require(n_s >= 1, "train_mlp: empty training set");

  ParamLayout L(n_m, n_h, n_k);
  if (n_s * n_k < 10 * L.total)
    std::cerr << "train_mlp: only " << n_s * n_k << " residuals for "
              << L.total << " parameters; fit may be underdetermined\n";

  MlpModel model;
  model.w_hidden = Mat(n_h, n_m);
  model.b_hidden = Vec(n_h);
  model.w_out = Mat(n_k, n_h);
  model.b_out = Vec(n_k);
  model.input_mean = inputs.colwise().mean();
  model.input_std = Vec(n_m);
  for (Index c = 0; c < n_m; ++c) {
    double var = (inputs.col(c).array() - model.input_mean[c]).square().mean();
    model.input_std[c] = var > 0.0 ? std::sqrt(var) : 1.0;
  }

  Rng rng(seed);
  Vec p(L.total);
  double sh = 1.0 / std::sqrt(double(n_m));
  double so = 1.0 / std::sqrt(double(n_h));
  for (Index i = 0; i < L.total; ++i) {
    double scale = i < L.wo0 ? sh : so;
    p[i] = scale * (2.0 * rng.uniform() - 1.0);
  }

  const Index n_res = n_s * n_k;
  Mat J(n_res, L.total);
  Vec r(n_res);

  auto evaluate = [&](const Vec& params, Vec& res, Mat* jac) -> double {
    MlpModel m = model;
    unpack(params, L, m);
    mlp_residuals(m, inputs, targets, res, jac);
    return res.squaredNorm() / double(n_res);
  };

  double mu = 1e-3;
  double mse = evaluate(p, r, &J);
  int epoch = 0;
  std::string reason = "max_epochs";
  double grad_inf = 0.0;

  for (; epoch < stop.max_epochs; ++epoch) {
    Mat jtj = Mat::Zero(L.total, L.total);
    jtj.selfadjointView<Eigen::Lower>().rankUpdate(J.transpose());
    jtj = jtj.selfadjointView<Eigen::Lower>();
    Vec jtr = J.transpose() * r;
    grad_inf = 2.0 * jtr.cwiseAbs().maxCoeff() / double(n_res);
    if (grad_inf < stop.gradient_threshold) {
      reason = "gradient";
      break;
    }

    bool accepted = false;
    while (mu <= stop.mu_max) {
      Mat A = jtj;
      A.diagonal().array() += mu;
      Eigen::LDLT<Mat> ldlt(A);
      if (ldlt.info() == Eigen::Success) {
        Vec delta = ldlt.solve(-jtr);
        Vec trial = p + delta;
        Vec r_trial(n_res);
        double mse_trial = evaluate(trial, r_trial, nullptr);
        if (std::isfinite(mse_trial) && mse_trial < mse) {
          p = trial;
          mse = mse_trial;
          model.record.mse_history.push_back(mse);
          mu = std::max(mu / 10.0, stop.mu_min);
          accepted = true;
          break;
        }
      }
      mu *= 10.0;
    }
    if (!accepted) {
      reason = "mu_max";
      break;
    }
    mse = evaluate(p, r, &J);
  }

  unpack(p, L, model);
  model.record.epochs_run = epoch;
  model.record.final_mse = mse;
  model.record.gradient_at_stop = grad_inf;
  model.record.stop_reason = reason;
  return model;
}

double fdi_error(const FaultVector& k_est, const FaultVector& k_act) {
  double acc = 0.0;
  for (int i = 0; i < kNumFaults; ++i) {
    double w = (i == 6) ? k_act[5] : 1.0;  // phase weighted by amplitude
    double d = k_est[i] - k_act[i];
    acc += w * d * d;
  }
  return std::sqrt(acc / double(kNumFaults));
}

}  // namespace phm
