#include "polyrep/kernels.hpp"

#include <cassert>

namespace polyrep::kernels {

namespace {

// Shared per-element bodies keep the OpenMP and serial variants bitwise equal.

inline void relu_features_row(const Eigen::MatrixXd& X, const Eigen::MatrixXd& W,
                              const Eigen::VectorXd& b, long i, Eigen::MatrixXd& phi) {
  const long m = W.rows();
  for (long j = 0; j < m; ++j) {
    const double z = W.row(j).dot(X.row(i)) + b(j);
    phi(i, j) = z > 0.0 ? z : 0.0;
  }
}

inline void ntk_features_row(const Eigen::MatrixXd& X, const Eigen::MatrixXd& W,
                             const Eigen::VectorXd& b, const Eigen::VectorXd& a,
                             long i, Eigen::MatrixXd& phi) {
  const long m = W.rows();
  const long d = W.cols();
  for (long j = 0; j < m; ++j) {
    const double z = W.row(j).dot(X.row(i)) + b(j);
    const double active = z >= 0.0 ? 1.0 : 0.0;
    phi(i, j) = z > 0.0 ? z : 0.0;
    const double aj_active = a(j) * active;
    for (long k = 0; k < d; ++k) phi(i, m + j * d + k) = aj_active * X(i, k);
    phi(i, m + m * d + j) = aj_active;
  }
}

inline void gram_entry(const Eigen::MatrixXd& phi, double scale, long j, long k,
                       Eigen::MatrixXd& G) {
  const double v = scale * phi.col(j).dot(phi.col(k));
  G(j, k) = v;
  G(k, j) = v;
}

inline void gradient_signal_row(const Eigen::MatrixXd& X, const Eigen::VectorXd& yhat,
                                const Eigen::MatrixXd& W, long j, Eigen::MatrixXd& out) {
  const long n = X.rows();
  Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(X.cols());
  for (long i = 0; i < n; ++i) {
    if (W.row(j).dot(X.row(i)) >= 0.0) acc += yhat(i) * X.row(i);
  }
  out.row(j) = acc / static_cast<double>(n);
}

inline void gaussian_row(std::uint64_t seed, const char* tag, long r,
                         Eigen::MatrixXd& out) {
  rng::Stream stream(rng::derive_seed(seed, tag, static_cast<std::uint64_t>(r)));
  for (long c = 0; c < out.cols(); ++c) out(r, c) = stream.next_gaussian();
}

}  // namespace

void relu_features(const Eigen::MatrixXd& X, const Eigen::MatrixXd& W,
                   const Eigen::VectorXd& b, Eigen::MatrixXd& phi) {
  const long n = X.rows();
  phi.resize(n, W.rows());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) relu_features_row(X, W, b, i, phi);
}

void relu_features_serial(const Eigen::MatrixXd& X, const Eigen::MatrixXd& W,
                          const Eigen::VectorXd& b, Eigen::MatrixXd& phi) {
  const long n = X.rows();
  phi.resize(n, W.rows());
  for (long i = 0; i < n; ++i) relu_features_row(X, W, b, i, phi);
}

void ntk_features(const Eigen::MatrixXd& X, const Eigen::MatrixXd& W,
                  const Eigen::VectorXd& b, const Eigen::VectorXd& a,
                  Eigen::MatrixXd& phi) {
  const long n = X.rows();
  phi.resize(n, W.rows() * (W.cols() + 2));
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) ntk_features_row(X, W, b, a, i, phi);
}

void ntk_features_serial(const Eigen::MatrixXd& X, const Eigen::MatrixXd& W,
                         const Eigen::VectorXd& b, const Eigen::VectorXd& a,
                         Eigen::MatrixXd& phi) {
  const long n = X.rows();
  phi.resize(n, W.rows() * (W.cols() + 2));
  for (long i = 0; i < n; ++i) ntk_features_row(X, W, b, a, i, phi);
}

void gram(const Eigen::MatrixXd& phi, double scale, Eigen::MatrixXd& G) {
  const long m = phi.cols();
  G.resize(m, m);
  // Row j of the upper triangle has m - j entries; dynamic scheduling balances
  // the shrinking rows.
#pragma omp parallel for schedule(dynamic, 8)
  for (long j = 0; j < m; ++j)
    for (long k = j; k < m; ++k) gram_entry(phi, scale, j, k, G);
}

void gram_serial(const Eigen::MatrixXd& phi, double scale, Eigen::MatrixXd& G) {
  const long m = phi.cols();
  G.resize(m, m);
  for (long j = 0; j < m; ++j)
    for (long k = j; k < m; ++k) gram_entry(phi, scale, j, k, G);
}

void feature_label_product(const Eigen::MatrixXd& phi, const Eigen::VectorXd& y,
                           double scale, Eigen::VectorXd& c) {
  const long m = phi.cols();
  c.resize(m);
#pragma omp parallel for schedule(static)
  for (long j = 0; j < m; ++j) c(j) = scale * phi.col(j).dot(y);
}

void feature_label_product_serial(const Eigen::MatrixXd& phi,
                                  const Eigen::VectorXd& y, double scale,
                                  Eigen::VectorXd& c) {
  const long m = phi.cols();
  c.resize(m);
  for (long j = 0; j < m; ++j) c(j) = scale * phi.col(j).dot(y);
}

void gradient_signal(const Eigen::MatrixXd& X, const Eigen::VectorXd& yhat,
                     const Eigen::MatrixXd& W, Eigen::MatrixXd& out) {
  const long m = W.rows();
  out.resize(m, W.cols());
#pragma omp parallel for schedule(static)
  for (long j = 0; j < m; ++j) gradient_signal_row(X, yhat, W, j, out);
}

void gradient_signal_serial(const Eigen::MatrixXd& X, const Eigen::VectorXd& yhat,
                            const Eigen::MatrixXd& W, Eigen::MatrixXd& out) {
  const long m = W.rows();
  out.resize(m, W.cols());
  for (long j = 0; j < m; ++j) gradient_signal_row(X, yhat, W, j, out);
}

void fill_gaussian_rows(std::uint64_t seed, const char* tag, Eigen::MatrixXd& out) {
  const long n = out.rows();
#pragma omp parallel for schedule(static)
  for (long r = 0; r < n; ++r) gaussian_row(seed, tag, r, out);
}

void fill_gaussian_rows_serial(std::uint64_t seed, const char* tag,
                               Eigen::MatrixXd& out) {
  const long n = out.rows();
  for (long r = 0; r < n; ++r) gaussian_row(seed, tag, r, out);
}

}  // namespace polyrep::kernels
