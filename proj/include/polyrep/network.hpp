#pragma once

// Two-layer ReLU network a^T relu(Wx + b) with the mirrored-pair
// initialization that makes the output identically zero.

#include <Eigen/Dense>
#include <cstdint>
#include <string>

namespace polyrep::network {

struct NetworkParams {
  Eigen::VectorXd a;  // m
  Eigen::MatrixXd W;  // m x d
  Eigen::VectorXd b;  // m

  long width() const { return a.size(); }
  long dim() const { return W.cols(); }
};

// a_j in {-1,+1}, w_j ~ N(0, I/d), b_j = 0 for j < m/2; neuron j + m/2 mirrors
// neuron j with the output weight negated.
NetworkParams init_symmetric(long m, long d, std::uint64_t seed);

// Sums mirrored pairs together, so the symmetric cancellation at init is exact
// in floating point.
double forward(const NetworkParams& params, const Eigen::VectorXd& x);

// phi(i, j) = relu(w_j . x_i + b_j); forward(x_i) == (phi a)(i) up to rounding.
void head_features(const NetworkParams& params, const Eigen::MatrixXd& X,
                   Eigen::MatrixXd& phi);

struct NetworkPredictor {
  NetworkParams params;
  double alpha = 0.0;
  Eigen::VectorXd beta;
};

double predict(const NetworkPredictor& predictor, const Eigen::VectorXd& x);
void predict_batch(const NetworkPredictor& predictor, const Eigen::MatrixXd& X,
                   Eigen::VectorXd& out);

// Flat binary file (magic, m, d, a, W row-major, b, alpha, beta); used for the
// pretrain -> finetune handoff. Format documented in the README.
void save_predictor(const NetworkPredictor& predictor, const std::string& path);
NetworkPredictor load_predictor(const std::string& path);

}  // namespace polyrep::network
