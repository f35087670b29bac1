#include "polyrep/network.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <stdexcept>

#include "polyrep/errors.hpp"
#include "polyrep/kernels.hpp"
#include "polyrep/rng.hpp"

namespace polyrep::network {

NetworkParams init_symmetric(long m, long d, std::uint64_t seed) {
  if (m < 2 || m % 2 != 0) throw OddWidth("init_symmetric: width must be even and >= 2");
  if (d < 1) throw DimensionMismatch("init_symmetric: dimension must be positive");

  NetworkParams params;
  params.a.resize(m);
  params.W.resize(m, d);
  params.b = Eigen::VectorXd::Zero(m);

  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  rng::Stream stream(rng::derive_seed(seed, "init"));
  const long half = m / 2;
  for (long j = 0; j < half; ++j) {
    params.a(j) = stream.next_sign();
    for (long k = 0; k < d; ++k) params.W(j, k) = scale * stream.next_gaussian();
  }
  for (long j = 0; j < half; ++j) {
    params.a(half + j) = -params.a(j);
    params.W.row(half + j) = params.W.row(j);
  }
  return params;
}

double forward(const NetworkParams& params, const Eigen::VectorXd& x) {
  if (x.size() != params.dim()) throw DimensionMismatch("forward: wrong input dimension");
  const long half = params.width() / 2;
  double acc = 0.0;
  for (long j = 0; j < half; ++j) {
    const double z0 = params.W.row(j).dot(x) + params.b(j);
    const double z1 = params.W.row(half + j).dot(x) + params.b(half + j);
    acc += params.a(j) * (z0 > 0.0 ? z0 : 0.0) + params.a(half + j) * (z1 > 0.0 ? z1 : 0.0);
  }
  return acc;
}

void head_features(const NetworkParams& params, const Eigen::MatrixXd& X,
                   Eigen::MatrixXd& phi) {
  if (X.cols() != params.dim()) throw DimensionMismatch("head_features: wrong input dimension");
  kernels::relu_features(X, params.W, params.b, phi);
}

double predict(const NetworkPredictor& predictor, const Eigen::VectorXd& x) {
  return predictor.alpha + predictor.beta.dot(x) + forward(predictor.params, x);
}

void predict_batch(const NetworkPredictor& predictor, const Eigen::MatrixXd& X,
                   Eigen::VectorXd& out) {
  if (X.cols() != predictor.params.dim())
    throw DimensionMismatch("predict_batch: wrong input dimension");
  const long n = X.rows();
  out.resize(n);
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) {
    const auto& params = predictor.params;
    const long half = params.width() / 2;
    double acc = 0.0;
    for (long j = 0; j < half; ++j) {
      const double z0 = params.W.row(j).dot(X.row(i)) + params.b(j);
      const double z1 = params.W.row(half + j).dot(X.row(i)) + params.b(half + j);
      acc += params.a(j) * (z0 > 0.0 ? z0 : 0.0) + params.a(half + j) * (z1 > 0.0 ? z1 : 0.0);
    }
    out(i) = predictor.alpha + predictor.beta.dot(X.row(i)) + acc;
  }
}

namespace {
constexpr char kMagic[8] = {'P', 'R', 'P', 'D', '0', '1', '\n', '\0'};
}

void save_predictor(const NetworkPredictor& predictor, const std::string& path) {
  std::FILE* file = std::fopen(path.c_str(), "wb");
  if (!file) throw std::runtime_error("save_predictor: cannot open " + path);
  const std::int64_t m = predictor.params.width();
  const std::int64_t d = predictor.params.dim();
  std::fwrite(kMagic, 1, sizeof(kMagic), file);
  std::fwrite(&m, sizeof(m), 1, file);
  std::fwrite(&d, sizeof(d), 1, file);
  std::fwrite(predictor.params.a.data(), sizeof(double), static_cast<std::size_t>(m), file);
  for (long i = 0; i < m; ++i)
    for (long j = 0; j < d; ++j) std::fwrite(&predictor.params.W(i, j), sizeof(double), 1, file);
  std::fwrite(predictor.params.b.data(), sizeof(double), static_cast<std::size_t>(m), file);
  std::fwrite(&predictor.alpha, sizeof(double), 1, file);
  std::fwrite(predictor.beta.data(), sizeof(double), static_cast<std::size_t>(d), file);
  std::fclose(file);
}

NetworkPredictor load_predictor(const std::string& path) {
  std::FILE* file = std::fopen(path.c_str(), "rb");
  if (!file) throw std::runtime_error("load_predictor: cannot open " + path);
  char magic[8];
  std::int64_t m = 0, d = 0;
  NetworkPredictor predictor;
  bool ok = std::fread(magic, 1, sizeof(magic), file) == sizeof(magic) &&
            std::memcmp(magic, kMagic, sizeof(magic)) == 0 &&
            std::fread(&m, sizeof(m), 1, file) == 1 && std::fread(&d, sizeof(d), 1, file) == 1 &&
            m >= 2 && d >= 1;
  if (ok) {
    predictor.params.a.resize(m);
    predictor.params.W.resize(m, d);
    predictor.params.b.resize(m);
    predictor.beta.resize(d);
    ok = std::fread(predictor.params.a.data(), sizeof(double), static_cast<std::size_t>(m), file) ==
         static_cast<std::size_t>(m);
    for (long i = 0; i < m && ok; ++i)
      for (long j = 0; j < d && ok; ++j)
        ok = std::fread(&predictor.params.W(i, j), sizeof(double), 1, file) == 1;
    ok = ok &&
         std::fread(predictor.params.b.data(), sizeof(double), static_cast<std::size_t>(m), file) ==
             static_cast<std::size_t>(m) &&
         std::fread(&predictor.alpha, sizeof(double), 1, file) == 1 &&
         std::fread(predictor.beta.data(), sizeof(double), static_cast<std::size_t>(d), file) ==
             static_cast<std::size_t>(d);
  }
  std::fclose(file);
  if (!ok) throw std::runtime_error("load_predictor: malformed file " + path);
  return predictor;
}

}  // namespace polyrep::network
