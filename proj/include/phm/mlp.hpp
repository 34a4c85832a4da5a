#pragma once

#include "phm/types.hpp"

namespace phm {

/// Single-hidden-layer perceptron: tansig hidden layer, linear output layer
/// saturated to [0,1] at inference time.
struct MlpModel {
  Mat w_hidden;   // n_h x n_m
  Vec b_hidden;   // n_h
  Mat w_out;      // n_k x n_h
  Vec b_out;      // n_k
  Vec input_mean, input_std;  // training-set standardization

  struct TrainingRecord {
    int epochs_run = 0;
    double final_mse = 0.0;
    double gradient_at_stop = 0.0;
    std::string stop_reason;
    std::vector<double> mse_history;  // after each accepted LM step
  } record;

  Index hidden_size() const { return b_hidden.size(); }
  Index input_size() const { return w_hidden.cols(); }
  Index output_size() const { return b_out.size(); }
};

inline double tansig(double x) { return 2.0 / (1.0 + std::exp(-2.0 * x)) - 1.0; }

/// Pre-saturation linear output of the network.
Vec mlp_forward_linear(const MlpModel& model, const Vec& alpha);

/// Inference: linear output clamped to [0,1] per component.
FaultVector mlp_forward(const MlpModel& model, const Vec& alpha);

struct MlpStop {
  int max_epochs = 1000;
  double gradient_threshold = 1e-7;
  double mu_min = 1e-10;
  double mu_max = 1e10;
};

/// Levenberg-Marquardt fit of the pre-saturation network output to the
/// targets (clamping is inference-only so the residuals stay smooth).
MlpModel train_mlp(const Mat& inputs, const Mat& targets, Index n_h,
                   const MlpStop& stop, std::uint64_t seed);

/// Packed parameter vector in the order W_h (row-major), b_h, W_o
/// (row-major), b_o. Exposed so the LM Jacobian can be checked against
/// finite differences of the forward pass.
Index mlp_parameter_count(const MlpModel& model);
Vec mlp_pack(const MlpModel& model);
void mlp_unpack(const Vec& params, MlpModel& model);

/// Pre-saturation residuals (o - target), sample-major with n_k rows per
/// sample, and optionally their Jacobian w.r.t. the packed parameters.
/// train_mlp evaluates its residuals through this function.
void mlp_residuals(const MlpModel& model, const Mat& inputs,
                   const Mat& targets, Vec& residuals, Mat* jacobian);

/// Weighted RMS fault-identification error; unit weights except the
/// eccentricity-phase residual, which is weighted by the actual
/// eccentricity amplitude.
double fdi_error(const FaultVector& k_est, const FaultVector& k_act);

}  // namespace phm
