#pragma once

// Gaussian design matrices, two-point label noise, and the first-moment
// centering step that precedes training.

#include <Eigen/Dense>
#include <cstdint>
#include <string>

#include "polyrep/targets.hpp"

namespace polyrep::data {

struct Dataset {
  Eigen::MatrixXd X;  // n x d, rows ~ N(0, I_d)
  Eigen::VectorXd y;  // y_i = f(x_i) + eps_i, eps_i in {-sigma, +sigma}
  double sigma_noise = 0.0;
  std::uint64_t seed = 0;

  long n() const { return X.rows(); }
  long d() const { return X.cols(); }
};

struct PreprocessStats {
  double alpha = 0.0;
  Eigen::VectorXd beta;
  Eigen::VectorXd y_centered;  // y_i - alpha - beta . x_i
};

// Deterministic given the seed: row i of X comes from its own stream
// derive_seed(seed, "x", i), noise signs from derive_seed(seed, "noise", i),
// so the result is identical for any thread count.
Dataset sample_dataset(const targets::TargetFunction& f, long n, double sigma,
                       std::uint64_t seed);

PreprocessStats preprocess(const Dataset& ds);

// Flat binary dump (magic, n, d, sigma, seed, X row-major, y). Debugging aid;
// format documented in the README.
void save_dataset(const Dataset& ds, const std::string& path);
Dataset load_dataset(const std::string& path);

}  // namespace polyrep::data
