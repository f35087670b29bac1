#pragma once

// Kernel-regime baselines: ridge on frozen random ReLU features, and ridge on
// the gradient features of the network at initialization (linearized model).
// Shared risk evaluation for every predictor kind.

#include <Eigen/Dense>
#include <cstdint>
#include <variant>

#include "polyrep/network.hpp"
#include "polyrep/targets.hpp"
#include "polyrep/trainer.hpp"

namespace polyrep::baselines {

// Linear model on the gradient features of a^T relu(Wx + b) at init, plus the
// alpha + beta.x affine part. Feature layout matches kernels::ntk_features.
struct NtkPredictor {
  network::NetworkParams params;  // frozen at init (biases reinitialized)
  Eigen::VectorXd head;           // m (d + 2) coefficients
  double alpha = 0.0;
  Eigen::VectorXd beta;
};

double predict(const NtkPredictor& predictor, const Eigen::VectorXd& x);
void predict_batch(const NtkPredictor& predictor, const Eigen::MatrixXd& X,
                   Eigen::VectorXd& out);

// Closed-form reference predictor scale * g(x); used for oracle comparisons
// such as the zero predictor and the best polynomial truncation of a target.
struct ReferencePredictor {
  targets::TargetFunction f;
  double scale = 1.0;
};

double predict(const ReferencePredictor& predictor, const Eigen::VectorXd& x);
void predict_batch(const ReferencePredictor& predictor, const Eigen::MatrixXd& X,
                   Eigen::VectorXd& out);

using Predictor = std::variant<network::NetworkPredictor, NtkPredictor, ReferencePredictor>;

double predict(const Predictor& predictor, const Eigen::VectorXd& x);
void predict_batch(const Predictor& predictor, const Eigen::MatrixXd& X, Eigen::VectorXd& out);

struct RiskReport {
  double l2_excess = 0.0;  // mean (pred - f*)^2 on fresh data
  double l1_excess = 0.0;  // mean |pred - y| minus the noise level
  long n_test = 0;
  double stderr_l2 = 0.0;
};

network::NetworkPredictor random_features_fit(const targets::TargetFunction& f, long n, long m,
                                              double sigma, const trainer::TrainConfig& cfg,
                                              std::uint64_t seed, double* tuned_lambda = nullptr);

NtkPredictor ntk_linearized_fit(const targets::TargetFunction& f, long n, long m, double sigma,
                                const trainer::TrainConfig& cfg, std::uint64_t seed,
                                double* tuned_lambda = nullptr);

RiskReport evaluate(const Predictor& predictor, const targets::TargetFunction& f, long n_test,
                    double sigma, std::uint64_t seed);

// Dual-form ridge predictions through the empirical kernel matrix; equivalent
// to the primal path and kept as a cross-check for tests.
Eigen::VectorXd ntk_gram_predict(const Eigen::MatrixXd& phi_train, const Eigen::VectorXd& yhat,
                                 const Eigen::MatrixXd& phi_test, double lambda);

}  // namespace polyrep::baselines
