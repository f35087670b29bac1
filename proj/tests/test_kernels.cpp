#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <omp.h>

#include <Eigen/Dense>

#include "polyrep/kernels.hpp"
#include "polyrep/rng.hpp"

using namespace polyrep;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

struct Fixture {
  MatrixXd X, W;
  VectorXd b, a, y;
  Fixture(long n, long d, long m) : X(n, d), W(m, d), b(m), a(m), y(n) {
    kernels::fill_gaussian_rows(101, "x", X);
    kernels::fill_gaussian_rows(102, "w", W);
    rng::Stream stream(103);
    for (long j = 0; j < m; ++j) {
      b(j) = stream.next_gaussian();
      a(j) = stream.next_sign();
    }
    for (long i = 0; i < n; ++i) y(i) = stream.next_gaussian();
  }
};

}  // namespace

TEST_CASE("openmp kernels are bitwise identical to the serial references") {
  for (auto [n, d, m] : {std::tuple<long, long, long>{257, 7, 12},
                         std::tuple<long, long, long>{1000, 10, 33},
                         std::tuple<long, long, long>{64, 3, 2}}) {
    Fixture fx(n, d, m);

    MatrixXd phi_par, phi_ser;
    kernels::relu_features(fx.X, fx.W, fx.b, phi_par);
    kernels::relu_features_serial(fx.X, fx.W, fx.b, phi_ser);
    CHECK(phi_par == phi_ser);

    MatrixXd ntk_par, ntk_ser;
    kernels::ntk_features(fx.X, fx.W, fx.b, fx.a, ntk_par);
    kernels::ntk_features_serial(fx.X, fx.W, fx.b, fx.a, ntk_ser);
    CHECK(ntk_par == ntk_ser);

    MatrixXd G_par, G_ser;
    kernels::gram(phi_par, 1.0 / static_cast<double>(n), G_par);
    kernels::gram_serial(phi_ser, 1.0 / static_cast<double>(n), G_ser);
    CHECK(G_par == G_ser);

    VectorXd c_par, c_ser;
    kernels::feature_label_product(phi_par, fx.y, 1.0 / static_cast<double>(n), c_par);
    kernels::feature_label_product_serial(phi_ser, fx.y, 1.0 / static_cast<double>(n), c_ser);
    CHECK(c_par == c_ser);

    MatrixXd s_par, s_ser;
    kernels::gradient_signal(fx.X, fx.y, fx.W, s_par);
    kernels::gradient_signal_serial(fx.X, fx.y, fx.W, s_ser);
    CHECK(s_par == s_ser);

    MatrixXd g_par(n, d), g_ser(n, d);
    kernels::fill_gaussian_rows(7, "g", g_par);
    kernels::fill_gaussian_rows_serial(7, "g", g_ser);
    CHECK(g_par == g_ser);
  }
}

TEST_CASE("kernel outputs are independent of the thread count") {
  Fixture fx(400, 8, 16);
  const int saved = omp_get_max_threads();

  omp_set_num_threads(1);
  MatrixXd phi1, G1;
  kernels::relu_features(fx.X, fx.W, fx.b, phi1);
  kernels::gram(phi1, 1.0 / 400, G1);
  const double sum1 = kernels::chunked_sum(400, [&](long i) { return fx.y(i) * fx.y(i); });

  omp_set_num_threads(4);
  MatrixXd phi4, G4;
  kernels::relu_features(fx.X, fx.W, fx.b, phi4);
  kernels::gram(phi4, 1.0 / 400, G4);
  const double sum4 = kernels::chunked_sum(400, [&](long i) { return fx.y(i) * fx.y(i); });

  omp_set_num_threads(saved);
  CHECK(phi1 == phi4);
  CHECK(G1 == G4);
  CHECK(sum1 == sum4);
}

TEST_CASE("relu feature values") {
  MatrixXd X(2, 3);
  X << 1.0, 2.0, -1.0, 0.5, 0.0, 0.0;
  MatrixXd W(2, 3);
  W << 1.0, 0.0, 0.0, 0.0, 1.0, 1.0;
  VectorXd b(2);
  b << -0.25, 1.0;
  MatrixXd phi;
  kernels::relu_features(X, W, b, phi);
  CHECK(phi(0, 0) == doctest::Approx(0.75));
  CHECK(phi(0, 1) == doctest::Approx(2.0));
  CHECK(phi(1, 0) == doctest::Approx(0.25));
  CHECK(phi(1, 1) == doctest::Approx(1.0));
}

TEST_CASE("gram matches the direct product") {
  Fixture fx(120, 5, 9);
  MatrixXd phi;
  kernels::relu_features(fx.X, fx.W, fx.b, phi);
  MatrixXd G;
  kernels::gram(phi, 0.25, G);
  const MatrixXd expected = 0.25 * phi.transpose() * phi;
  CHECK((G - expected).cwiseAbs().maxCoeff() <= 1e-12 * expected.cwiseAbs().maxCoeff());
  CHECK(G == G.transpose());
}

TEST_CASE("ntk feature layout") {
  Fixture fx(6, 4, 3);
  MatrixXd phi;
  kernels::ntk_features(fx.X, fx.W, fx.b, fx.a, phi);
  REQUIRE(phi.cols() == 3 * (4 + 2));
  for (long i = 0; i < 6; ++i) {
    for (long j = 0; j < 3; ++j) {
      const double z = fx.W.row(j).dot(fx.X.row(i)) + fx.b(j);
      const double active = z >= 0.0 ? 1.0 : 0.0;
      CHECK(phi(i, j) == std::max(0.0, z));
      for (long k = 0; k < 4; ++k)
        CHECK(phi(i, 3 + j * 4 + k) == fx.a(j) * active * fx.X(i, k));
      CHECK(phi(i, 3 + 12 + j) == fx.a(j) * active);
    }
  }
}

TEST_CASE("gaussian fill has the right moments and is row-seeded") {
  MatrixXd X(20000, 5);
  kernels::fill_gaussian_rows(42, "x", X);
  const double mean = X.mean();
  const double var = (X.array() - mean).square().mean();
  CHECK(std::abs(mean) < 0.02);
  CHECK(var == doctest::Approx(1.0).epsilon(0.03));

  // Extending the matrix keeps the existing rows' draws.
  MatrixXd Y(30000, 5);
  kernels::fill_gaussian_rows(42, "x", Y);
  CHECK(Y.topRows(20000) == X);
}

TEST_CASE("chunked accumulate matches a plain sum") {
  const long n = 100000;
  VectorXd v(n);
  rng::Stream stream(11);
  for (long i = 0; i < n; ++i) v(i) = stream.next_gaussian();
  const double chunked = kernels::chunked_sum(n, [&](long i) { return v(i); });
  long double direct = 0.0;
  for (long i = 0; i < n; ++i) direct += v(i);
  CHECK(chunked == doctest::Approx(static_cast<double>(direct)).epsilon(1e-10));
}
