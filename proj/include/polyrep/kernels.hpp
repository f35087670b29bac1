#pragma once

// Data-parallel inner loops, each in an OpenMP variant and a serial reference.
// Every output element is produced by exactly one thread with the same
// per-element arithmetic as the serial path, so the two variants are bitwise
// identical and results do not depend on the thread count.

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <vector>

#include "polyrep/rng.hpp"

namespace polyrep::kernels {

inline constexpr long kReduceChunk = 4096;

// phi(i, j) = max(0, w_j . x_i + b_j). X is n x d with sample rows, W is m x d
// with neuron rows.
void relu_features(const Eigen::MatrixXd& X, const Eigen::MatrixXd& W,
                   const Eigen::VectorXd& b, Eigen::MatrixXd& phi);
void relu_features_serial(const Eigen::MatrixXd& X, const Eigen::MatrixXd& W,
                          const Eigen::VectorXd& b, Eigen::MatrixXd& phi);

// Gradient features of a^T relu(Wx + b) with respect to (a, W, b), laid out as
// [sigma(z_j)]_{j<m} ++ [a_j x_k 1{z_j>=0}]_{j<m,k<d} ++ [a_j 1{z_j>=0}]_{j<m}.
void ntk_features(const Eigen::MatrixXd& X, const Eigen::MatrixXd& W,
                  const Eigen::VectorXd& b, const Eigen::VectorXd& a,
                  Eigen::MatrixXd& phi);
void ntk_features_serial(const Eigen::MatrixXd& X, const Eigen::MatrixXd& W,
                         const Eigen::VectorXd& b, const Eigen::VectorXd& a,
                         Eigen::MatrixXd& phi);

// G = scale * phi^T phi (symmetric, both triangles filled).
void gram(const Eigen::MatrixXd& phi, double scale, Eigen::MatrixXd& G);
void gram_serial(const Eigen::MatrixXd& phi, double scale, Eigen::MatrixXd& G);

// c = scale * phi^T y.
void feature_label_product(const Eigen::MatrixXd& phi, const Eigen::VectorXd& y,
                           double scale, Eigen::VectorXd& c);
void feature_label_product_serial(const Eigen::MatrixXd& phi,
                                  const Eigen::VectorXd& y, double scale,
                                  Eigen::VectorXd& c);

// Per-neuron gradient signal rows: out.row(j) = (1/n) sum_i yhat_i x_i 1{w_j . x_i >= 0}.
void gradient_signal(const Eigen::MatrixXd& X, const Eigen::VectorXd& yhat,
                     const Eigen::MatrixXd& W, Eigen::MatrixXd& out);
void gradient_signal_serial(const Eigen::MatrixXd& X, const Eigen::VectorXd& yhat,
                            const Eigen::MatrixXd& W, Eigen::MatrixXd& out);

// Fills each row r of out from its own stream derive_seed(seed, tag, r); the
// result is independent of the thread count.
void fill_gaussian_rows(std::uint64_t seed, const char* tag, Eigen::MatrixXd& out);
void fill_gaussian_rows_serial(std::uint64_t seed, const char* tag,
                               Eigen::MatrixXd& out);

// Deterministic chunked reduction: per-chunk partial sums are accumulated
// serially in chunk order, so the result is identical for any thread count.
template <std::size_t K, class PerIndex>
std::array<double, K> chunked_accumulate(long n, PerIndex&& per_index) {
  const long nchunks = (n + kReduceChunk - 1) / kReduceChunk;
  std::vector<std::array<double, K>> partial(
      static_cast<std::size_t>(std::max<long>(nchunks, 1)), std::array<double, K>{});
#pragma omp parallel for schedule(static)
  for (long c = 0; c < nchunks; ++c) {
    std::array<double, K> acc{};
    const long lo = c * kReduceChunk;
    const long hi = std::min(n, lo + kReduceChunk);
    for (long i = lo; i < hi; ++i) per_index(i, acc);
    partial[static_cast<std::size_t>(c)] = acc;
  }
  std::array<double, K> total{};
  for (long c = 0; c < nchunks; ++c)
    for (std::size_t k = 0; k < K; ++k) total[k] += partial[static_cast<std::size_t>(c)][k];
  return total;
}

template <class PerIndex>
double chunked_sum(long n, PerIndex&& per_index) {
  auto total = chunked_accumulate<1>(n, [&](long i, std::array<double, 1>& acc) {
    acc[0] += per_index(i);
  });
  return total[0];
}

}  // namespace polyrep::kernels
