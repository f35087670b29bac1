#pragma once

// Layerwise training: one weight-decayed gradient step on the hidden layer
// (the decay exactly cancels the initialization), bias reinitialization, then
// ridge regression on the head with the decay strength tuned on a holdout set.

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "polyrep/data.hpp"
#include "polyrep/network.hpp"
#include "polyrep/targets.hpp"

namespace polyrep::trainer {

struct TrainConfig {
  double eta1 = 0.0;  // first-layer step size; 0 = default_eta1(n, m, d)
  double eta = 0.0;   // head GD step size; 0 = auto from the curvature bound
  std::vector<double> lambda_grid;  // empty = default_lambda_grid()
  long T = 10000;
  double tol = 1e-12;
  long holdout_n = 0;        // 0 = min(holdout_cap, 10 n)
  long holdout_cap = 100000; // fast profiles lower this
  bool head_gd = false;            // closed-form ridge by default
  bool resample_stage2 = false;    // fresh sample for the head stage
};

std::vector<double> default_lambda_grid();
double default_eta1(long n, long m, long d);
long default_holdout_n(long n, long cap = 100000);

// Empirical gradient signal (1/n) sum_i yhat_i x_i 1{w . x_i >= 0}.
Eigen::VectorXd g_n(const Eigen::VectorXd& w, const data::Dataset& ds,
                    const data::PreprocessStats& stats);

// W^(1) with rows 2 eta1 a_j g_n(w_j). Requires the network to still be at the
// symmetric initialization (zero output, checked on probe points).
Eigen::MatrixXd first_layer_step(const network::NetworkParams& params,
                                 const data::Dataset& ds,
                                 const data::PreprocessStats& stats, double eta1);

// Fresh b_j ~ N(0,1) for all m neurons (mirrored pairing not restored).
Eigen::VectorXd reinit_biases(const network::NetworkParams& params, std::uint64_t seed);

// argmin (1/n)||phi a - yhat||^2 + lambda ||a||^2. lambda = 0 falls back to the
// minimum-norm least-squares solution.
Eigen::VectorXd ridge_closed_form(const Eigen::MatrixXd& phi, const Eigen::VectorXd& yhat,
                                  double lambda);

// Same objective by full-batch gradient descent from a0; stops after T steps
// or when the step norm drops below tol.
Eigen::VectorXd train_head_gd(const Eigen::MatrixXd& phi, const Eigen::VectorXd& yhat,
                              const Eigen::VectorXd& a0, double eta, double lambda, long T,
                              double tol);

// Spec-shaped wrapper: features from the network, labels from the stats.
Eigen::VectorXd train_head_gd(const network::NetworkParams& params, const data::Dataset& ds,
                              const data::PreprocessStats& stats, double eta, double lambda,
                              long T, double tol);

struct LambdaChoice {
  double lambda = 0.0;
  Eigen::VectorXd head;
  std::vector<double> holdout_risks;  // one per grid entry, grid order
};

// Fits one head per grid entry on (phi_train, yhat) and scores the full
// predictor (offset + phi a) against raw holdout labels. Ties break toward the
// larger lambda. Uses primal or dual normal equations, whichever side is
// smaller. a0 seeds the gradient-descent path and is ignored by the closed
// form.
LambdaChoice tune_lambda_features(const Eigen::MatrixXd& phi_train,
                                  const Eigen::VectorXd& yhat,
                                  const Eigen::MatrixXd& phi_holdout,
                                  const Eigen::VectorXd& holdout_offset,
                                  const Eigen::VectorXd& holdout_y,
                                  const std::vector<double>& grid, const TrainConfig& cfg,
                                  const Eigen::VectorXd& a0 = Eigen::VectorXd());

// Spec-shaped wrapper over head features of `params`.
LambdaChoice tune_lambda(const network::NetworkParams& params, const data::Dataset& train_ds,
                         const data::PreprocessStats& stats, const data::Dataset& holdout_ds,
                         const std::vector<double>& grid, const TrainConfig& cfg);

struct AlgorithmTrace {
  Eigen::MatrixXd W1;
  double tuned_lambda = 0.0;
  double eta1 = 0.0;
  std::vector<double> holdout_risks;
};

network::NetworkPredictor run_algorithm1(const targets::TargetFunction& f, long n, long m,
                                         double sigma, const TrainConfig& cfg,
                                         std::uint64_t seed, AlgorithmTrace* trace = nullptr);

// Keeps the pretrained W and b frozen, recomputes alpha/beta on the target
// data, and refits only the head.
network::NetworkPredictor retrain_head_transfer(const network::NetworkPredictor& pretrained,
                                                const data::Dataset& target_ds,
                                                const data::Dataset& target_holdout,
                                                const TrainConfig& cfg, double* tuned_lambda = nullptr);

}  // namespace polyrep::trainer
