#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "polyrep/errors.hpp"
#include "polyrep/kernels.hpp"
#include "polyrep/network.hpp"
#include "polyrep/rng.hpp"

using namespace polyrep;
using Eigen::MatrixXd;
using Eigen::VectorXd;

TEST_CASE("symmetric initialization structure") {
  const auto params = network::init_symmetric(64, 12, 5);
  const long half = 32;
  for (long j = 0; j < half; ++j) {
    CHECK(params.a(j) == -params.a(half + j));
    CHECK(std::abs(params.a(j)) == 1.0);
    CHECK(params.W.row(j) == params.W.row(half + j));
    CHECK(params.b(j) == params.b(half + j));
  }
  CHECK(params.b.cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(network::init_symmetric(7, 3, 1), OddWidth);
  CHECK_THROWS_AS(network::init_symmetric(0, 3, 1), OddWidth);
}

TEST_CASE("zero output at initialization, exactly") {
  const auto params = network::init_symmetric(128, 9, 17);
  rng::Stream stream(rng::derive_seed(17, "x"));
  for (int trial = 0; trial < 1000; ++trial) {
    VectorXd x(9);
    for (int k = 0; k < 9; ++k) x(k) = stream.next_gaussian();
    CHECK(network::forward(params, x) == 0.0);
  }
}

TEST_CASE("neuron weight norms concentrate at 1") {
  const long m = 10000;
  const int d = 10;
  const auto params = network::init_symmetric(m, d, 23);
  double mean = 0.0;
  for (long j = 0; j < m / 2; ++j) mean += params.W.row(j).squaredNorm();
  mean /= static_cast<double>(m / 2);
  const double budget =
      3.0 * std::sqrt(2.0 / d) / std::sqrt(static_cast<double>(m / 2));
  CHECK(std::abs(mean - 1.0) <= budget);
}

TEST_CASE("forward closed-form examples") {
  network::NetworkParams params;
  params.a = VectorXd(2);
  params.W = MatrixXd::Zero(2, 4);
  params.b = VectorXd::Zero(2);

  // Symmetric pair: +relu(z) - relu(z) = 0.
  params.a << 1.0, -1.0;
  params.W.row(0) << 0.3, -0.2, 0.0, 1.0;
  params.W.row(1) = params.W.row(0);
  VectorXd x(4);
  x << 3.0, 0.5, -2.0, 0.25;
  CHECK(network::forward(params, x) == 0.0);

  // Single active neuron: 2 relu(3 - 1) = 4 (the second neuron is zeroed out).
  params.a << 2.0, 0.0;
  params.W.setZero();
  params.W(0, 0) = 1.0;
  params.b << -1.0, 0.0;
  CHECK(network::forward(params, x) == 4.0);

  // All units inactive.
  params.b << -100.0, -100.0;
  params.a << 1.3, 2.7;
  CHECK(network::forward(params, x) == 0.0);
}

TEST_CASE("head_features matches forward and a brute-force loop") {
  auto params = network::init_symmetric(4, 3, 31);
  rng::Stream stream(rng::derive_seed(31, "b"));
  for (long j = 0; j < 4; ++j) params.b(j) = stream.next_gaussian();
  MatrixXd X(5, 3);
  kernels::fill_gaussian_rows(32, "x", X);

  MatrixXd phi;
  network::head_features(params, X, phi);
  for (long i = 0; i < 5; ++i) {
    for (long j = 0; j < 4; ++j) {
      double z = params.b(j);
      for (long k = 0; k < 3; ++k) z += params.W(j, k) * X(i, k);
      CHECK(phi(i, j) == std::max(0.0, z));
    }
    const double via_features = phi.row(i).dot(params.a);
    const double direct = network::forward(params, X.row(i).transpose());
    CHECK(via_features == doctest::Approx(direct).epsilon(1e-12));
  }

  // Zero weights with unit bias give constant features.
  params.W.setZero();
  params.b.setOnes();
  network::head_features(params, X, phi);
  CHECK((phi.array() == 1.0).all());
}

TEST_CASE("positive homogeneity in the first layer with zero bias") {
  auto params = network::init_symmetric(16, 5, 37);
  rng::Stream stream(rng::derive_seed(37, "x"));
  auto doubled = params;
  doubled.W *= 2.0;
  auto scaled = params;
  scaled.W *= 1.7;
  for (int trial = 0; trial < 50; ++trial) {
    VectorXd x(5);
    for (int k = 0; k < 5; ++k) x(k) = stream.next_gaussian();
    // a_j = +-1 and relu(c z) = c relu(z): scaling by 2 is bit-exact.
    CHECK(network::forward(doubled, x) == 2.0 * network::forward(params, x));
    CHECK(network::forward(scaled, x) ==
          doctest::Approx(1.7 * network::forward(params, x)).epsilon(1e-12));
  }
}

TEST_CASE("predict adds the affine part") {
  network::NetworkPredictor predictor;
  predictor.params = network::init_symmetric(8, 3, 41);
  predictor.alpha = 0.25;
  predictor.beta = VectorXd(3);
  predictor.beta << 1.0, -2.0, 0.5;
  VectorXd x(3);
  x << 1.0, 1.0, 2.0;
  // Network output is zero at init, so predict is alpha + beta . x.
  CHECK(network::predict(predictor, x) == doctest::Approx(0.25 + 1.0 - 2.0 + 1.0));

  MatrixXd X(7, 3);
  kernels::fill_gaussian_rows(43, "x", X);
  VectorXd out;
  network::predict_batch(predictor, X, out);
  for (long i = 0; i < 7; ++i)
    CHECK(out(i) == doctest::Approx(network::predict(predictor, X.row(i).transpose())).epsilon(1e-14));
}

TEST_CASE("predictor save/load round trip") {
  network::NetworkPredictor predictor;
  predictor.params = network::init_symmetric(6, 4, 47);
  rng::Stream stream(rng::derive_seed(47, "fill"));
  for (long j = 0; j < 6; ++j) {
    predictor.params.a(j) = stream.next_gaussian();
    predictor.params.b(j) = stream.next_gaussian();
  }
  predictor.alpha = stream.next_gaussian();
  predictor.beta = VectorXd(4);
  for (int k = 0; k < 4; ++k) predictor.beta(k) = stream.next_gaussian();

  const std::string path = "test_predictor_roundtrip.bin";
  network::save_predictor(predictor, path);
  const auto loaded = network::load_predictor(path);
  CHECK(loaded.params.a == predictor.params.a);
  CHECK(loaded.params.W == predictor.params.W);
  CHECK(loaded.params.b == predictor.params.b);
  CHECK(loaded.alpha == predictor.alpha);
  CHECK(loaded.beta == predictor.beta);
  std::remove(path.c_str());
}
