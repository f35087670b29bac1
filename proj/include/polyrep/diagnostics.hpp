#pragma once

// Empirical checks of the feature-learning math: the population gradient
// signal and its leading term, how fast the remainder shrinks with the
// dimension, the alignment of the learned first layer with the latent
// subspace, univariate random-feature weights, and complexity-bound
// calculators.

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "polyrep/hermite.hpp"
#include "polyrep/targets.hpp"

namespace polyrep::diagnostics {

struct PopulationGEstimate {
  Eigen::VectorXd g;
  Eigen::VectorXd stderr_per_coord;
};

// Plain Monte Carlo over n_mc fresh Gaussians of fhat(x) x 1{w.x >= 0}, where
// fhat subtracts the analytic C_0 and C_1 terms (not empirical moments).
PopulationGEstimate estimate_population_g(const targets::TargetFunction& f,
                                          const Eigen::VectorXd& w, long n_mc,
                                          std::uint64_t seed);

Eigen::VectorXd leading_term(const Eigen::MatrixXd& H, const Eigen::VectorXd& w);

// Closed form of E[fhat(x) x 1{w.x >= 0}] for single-index targets, expressed
// in the (w, v) plane with u = rho w + gamma v. Oracle for the estimators.
struct InPlaneG {
  double along_w = 0.0;
  double along_v = 0.0;
};
InPlaneG population_g_closed_form(const hermite::HermiteSeries& centered, double rho);

struct ResidualRow {
  int d = 0;
  double mean_residual = 0.0;  // mean over trials of ||ghat(w) - Hw/sqrt(2 pi)||
  double stderr_mean = 0.0;    // spread of the trial residuals / sqrt(trials)
  double mc_stderr = 0.0;      // average per-trial Monte Carlo standard error
  double ref_inv_d = 0.0;      // 1/d reference curve
};

// For each d, builds the single-index target from `component` on u = e_1,
// draws `trials` random unit w, and estimates the residual with a
// variance-reduced conditional Monte Carlo over n_mc draws (see README).
// Throws InsufficientPrecision when the Monte Carlo error is too large
// relative to the measured residual.
std::vector<ResidualRow> residual_scaling_study(const hermite::HermiteSeries& component,
                                                const std::vector<int>& dims, long n_mc,
                                                int trials, std::uint64_t seed);

struct AlignmentReport {
  double projection_ratio = 0.0;  // ||W1 P*||_F^2 / ||W1||_F^2
  int latent_rank = 0;            // numerical rank of U W1^T
  Eigen::VectorXd per_neuron_cos;
};

AlignmentReport subspace_alignment(const Eigen::MatrixXd& W1, const targets::TargetFunction& f);

enum class VkMode { kUniform, kGaussian };

// Weights v_k(a, b) with E[v_k(a,b) relu(a x + b)] = x^k on |x| <= 1, for
// a ~ {-1,+1} and b either uniform on [-1,1] or standard normal.
double monomial_weight_v(int k, double a, double b, VkMode mode);

// 2 B_a B_w sqrt(m d / n).
double rademacher_two_layer(double B_a, double B_w, long m, long d, long n);

// sqrt(B_a^2 (||W||_F^2 + ||b||^2) / n).
double rademacher_linear(double B_a, double W_frob_sq, double b_norm_sq, long n);

}  // namespace polyrep::diagnostics
