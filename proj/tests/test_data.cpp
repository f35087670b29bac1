#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "polyrep/data.hpp"
#include "polyrep/errors.hpp"

using namespace polyrep;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

targets::TargetFunction experiment_target(int d = 10) {
  MatrixXd U = MatrixXd::Zero(1, d);
  U(0, 0) = 1.0;
  return targets::make_target(U, {{{0.0, 0.0, 0.5, 0.0, 1.0 / (4.0 * std::sqrt(3.0))}}});
}

targets::TargetFunction linear_target(int d) {
  MatrixXd U = MatrixXd::Zero(1, d);
  U(0, 0) = 1.0;
  return targets::make_target(U, {{{0.0, 1.0}}});
}

}  // namespace

TEST_CASE("noiseless labels equal the target exactly") {
  const auto f = experiment_target(6);
  const auto ds = data::sample_dataset(f, 500, 0.0, 7);
  for (long i = 0; i < ds.n(); ++i) {
    CHECK(ds.y(i) == targets::eval_target(f, ds.X.row(i).transpose()));
  }
}

TEST_CASE("two-point noise has squared magnitude sigma^2 exactly") {
  const auto f = experiment_target(6);
  const auto ds = data::sample_dataset(f, 20000, 1.0, 8);
  double mean_sq = 0.0;
  double mean = 0.0;
  for (long i = 0; i < ds.n(); ++i) {
    const double eps = ds.y(i) - targets::eval_target(f, ds.X.row(i).transpose());
    mean_sq += eps * eps;
    mean += eps;
  }
  mean_sq /= static_cast<double>(ds.n());
  mean /= static_cast<double>(ds.n());
  CHECK(std::abs(mean_sq - 1.0) <= 1e-12);
  // Signs are balanced: mean within 3/sqrt(n).
  CHECK(std::abs(mean) <= 3.0 / std::sqrt(static_cast<double>(ds.n())));
}

TEST_CASE("fixed seed reproduces the dataset bit for bit") {
  const auto f = experiment_target(9);
  const auto ds1 = data::sample_dataset(f, 333, 1.0, 12345);
  const auto ds2 = data::sample_dataset(f, 333, 1.0, 12345);
  CHECK(ds1.X == ds2.X);
  CHECK(ds1.y == ds2.y);
  const auto ds3 = data::sample_dataset(f, 333, 1.0, 12346);
  CHECK(ds1.X != ds3.X);
}

TEST_CASE("sample_dataset rejects invalid arguments") {
  const auto f = experiment_target(4);
  CHECK_THROWS_AS(data::sample_dataset(f, 0, 1.0, 1), DimensionMismatch);
  CHECK_THROWS_AS(data::sample_dataset(f, 10, -0.5, 1), DimensionMismatch);
  CHECK_NOTHROW(data::sample_dataset(f, 1, 1.0, 1));  // n = 1 is allowed
}

TEST_CASE("preprocess on all-zero labels") {
  data::Dataset ds;
  ds.X = MatrixXd::Random(50, 4);
  ds.y = VectorXd::Zero(50);
  const auto stats = data::preprocess(ds);
  CHECK(stats.alpha == 0.0);
  CHECK(stats.beta.cwiseAbs().maxCoeff() == 0.0);
  CHECK(stats.y_centered.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("beta recovers the linear part") {
  const int d = 10;
  const long n = 1000000;
  const auto f = linear_target(d);
  const auto ds = data::sample_dataset(f, n, 0.0, 99);
  const auto stats = data::preprocess(ds);
  VectorXd u = VectorXd::Zero(d);
  u(0) = 1.0;
  CHECK((stats.beta - u).norm() <=
        3.0 * 2.0 * std::sqrt(static_cast<double>(d) / static_cast<double>(n)));
  CHECK(std::abs(stats.alpha) <= 0.01);
}

TEST_CASE("centering statistics vanish for a purely quadratic-quartic target") {
  const long n = 1000000;
  const auto f = experiment_target(10);
  const auto ds = data::sample_dataset(f, n, 1.0, 100);
  const auto stats = data::preprocess(ds);
  CHECK(std::abs(stats.alpha) <= 0.01);
  CHECK(stats.beta.norm() <= 0.02);
}

TEST_CASE("centered labels have mean bounded by the beta correlation term") {
  const auto f = experiment_target(8);
  const auto ds = data::sample_dataset(f, 5000, 1.0, 101);
  const auto stats = data::preprocess(ds);
  const double mean_centered = stats.y_centered.mean();
  const VectorXd xbar = ds.X.colwise().mean().transpose();
  CHECK(std::abs(mean_centered) <= stats.beta.norm() * xbar.norm() + 1e-12);
  // Definition holds row by row.
  for (long i = 0; i < 20; ++i) {
    CHECK(stats.y_centered(i) ==
          ds.y(i) - stats.alpha - stats.beta.dot(ds.X.row(i).transpose()));
  }
}

TEST_CASE("dataset dump/load round trip") {
  const auto f = experiment_target(5);
  const auto ds = data::sample_dataset(f, 64, 0.5, 77);
  const std::string path = "test_dataset_roundtrip.bin";
  data::save_dataset(ds, path);
  const auto loaded = data::load_dataset(path);
  CHECK(loaded.X == ds.X);
  CHECK(loaded.y == ds.y);
  CHECK(loaded.sigma_noise == ds.sigma_noise);
  CHECK(loaded.seed == ds.seed);
  std::remove(path.c_str());
  CHECK_THROWS(data::load_dataset("does_not_exist.bin"));
}
