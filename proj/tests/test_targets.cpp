#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "polyrep/data.hpp"
#include "polyrep/errors.hpp"
#include "polyrep/kernels.hpp"
#include "polyrep/rng.hpp"
#include "polyrep/targets.hpp"

using namespace polyrep;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

const double kQuartic = 1.0 / (4.0 * std::sqrt(3.0));

targets::TargetFunction experiment_target(int d = 10) {
  MatrixXd U = MatrixXd::Zero(1, d);
  U(0, 0) = 1.0;
  return targets::make_target(U, {{{0.0, 0.0, 0.5, 0.0, kQuartic}}});
}

}  // namespace

TEST_CASE("make_target keeps an already normalized function unchanged") {
  const auto f = experiment_target();
  CHECK(f.components[0].coeffs[2] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(f.components[0].coeffs[4] == doctest::Approx(kQuartic).epsilon(1e-12));
  CHECK(f.max_degree() == 4);
}

TEST_CASE("make_target rescales by a single global factor") {
  MatrixXd U = MatrixXd::Zero(2, 5);
  U(0, 0) = 1.0;
  U(1, 1) = 1.0;
  const auto f = targets::make_target(U, {{{0.0, 0.0, 1.0}}, {{0.0, 0.0, 1.0}}});
  // 2 (alpha^2 2!) = 1 => alpha = 1/2.
  CHECK(f.components[0].coeffs[2] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(f.components[1].coeffs[2] == doctest::Approx(0.5).epsilon(1e-12));

  double total = 0.0;
  for (const auto& g : f.components) total += hermite::series_l2_norm_sq(g);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("make_target rejects bad inputs") {
  MatrixXd not_orthonormal(2, 4);
  not_orthonormal << 1, 0, 0, 0, 1, 0.01, 0, 0;
  CHECK_THROWS_AS(
      targets::make_target(not_orthonormal, {{{0.0, 1.0}}, {{0.0, 1.0}}}),
      NonOrthonormalDirections);

  MatrixXd U = MatrixXd::Identity(1, 3);
  CHECK_THROWS_AS(targets::make_target(U, {{{0.0, 0.0, 0.0}}}), ZeroFunction);
  CHECK_THROWS_AS(targets::make_target(MatrixXd::Identity(4, 3),
                                       {{{0.0, 1.0}}, {{0.0, 1.0}}, {{0.0, 1.0}}, {{0.0, 1.0}}}),
                  DimensionMismatch);
}

TEST_CASE("eval_target closed-form values") {
  const auto f = experiment_target();
  VectorXd x = VectorXd::Zero(10);
  x(3) = 2.5;  // orthogonal coordinates do not matter
  CHECK(targets::eval_target(f, x) == doctest::Approx(-0.5 + 3.0 * kQuartic).epsilon(1e-12));

  MatrixXd U = MatrixXd::Zero(1, 4);
  U(0, 2) = 1.0;
  const auto linear = targets::make_target(U, {{{0.0, 1.0}}});
  VectorXd u = U.row(0).transpose();
  CHECK(targets::eval_target(linear, u) == doctest::Approx(1.0).epsilon(1e-12));

  VectorXd wrong(3);
  CHECK_THROWS_AS(targets::eval_target(f, wrong), DimensionMismatch);
}

TEST_CASE("eval_target depends only on the latent projection") {
  const auto f = experiment_target(8);
  rng::Stream stream(5);
  for (int trial = 0; trial < 20; ++trial) {
    VectorXd x(8);
    for (int k = 0; k < 8; ++k) x(k) = stream.next_gaussian();
    const VectorXd latent = targets::latent_projection(f, x);
    const VectorXd reconstructed = f.U.transpose() * latent;
    CHECK(targets::eval_target(f, x) ==
          doctest::Approx(targets::eval_target(f, reconstructed)).epsilon(1e-12));
  }
}

TEST_CASE("expected_hessian closed forms") {
  const auto f = experiment_target();
  const auto summary = targets::expected_hessian(f);
  CHECK(summary.rank == 1);
  CHECK(summary.kappa == doctest::Approx(1.0).epsilon(1e-12));
  MatrixXd expected = MatrixXd::Zero(10, 10);
  expected(0, 0) = 1.0;
  CHECK((summary.H - expected).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK(summary.H == summary.H.transpose());
  CHECK(summary.principal_basis.cols() == 1);
  CHECK(std::abs(summary.principal_basis.col(0).dot(f.U.row(0).transpose())) ==
        doctest::Approx(1.0).epsilon(1e-12));

  MatrixXd U = MatrixXd::Zero(1, 6);
  U(0, 0) = 1.0;
  const auto cubic = targets::make_target(U, {{{0.0, 0.0, 0.0, 1.0 / std::sqrt(6.0)}}});
  const auto cubic_summary = targets::expected_hessian(cubic);
  CHECK(cubic_summary.rank == 0);
  CHECK(cubic_summary.kappa == 0.0);
  CHECK(cubic_summary.H.cwiseAbs().maxCoeff() == 0.0);

  const auto quad = targets::make_target(U, {{{0.0, 0.0, 1.0 / std::sqrt(2.0)}}});
  const auto quad_summary = targets::expected_hessian(quad);
  CHECK(quad_summary.H(0, 0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(quad_summary.rank == 1);
}

TEST_CASE("ck_coefficient factored tensors") {
  const auto f = experiment_target();
  const auto c2 = targets::ck_coefficient(f, 2);
  REQUIRE(c2.size() == 1);
  CHECK(c2[0].scale == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(c2[0].t == 0);

  const auto c4 = targets::ck_coefficient(f, 4);
  REQUIRE(c4.size() == 1);
  CHECK(c4[0].scale == doctest::Approx(2.0 * std::sqrt(3.0)).epsilon(1e-12));

  CHECK(targets::ck_coefficient(f, 3).empty());

  // C_2 agrees with the expected Hessian exactly.
  const auto summary = targets::expected_hessian(f);
  MatrixXd c2_matrix = MatrixXd::Zero(f.d, f.d);
  for (const auto& term : c2)
    c2_matrix += term.scale * (f.U.row(term.t).transpose() * f.U.row(term.t));
  CHECK((c2_matrix - summary.H).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("latent_projection") {
  MatrixXd U = MatrixXd::Zero(2, 6);
  U(0, 0) = 1.0;
  U(1, 3) = 1.0;
  const auto f = targets::make_target(U, {{{0.0, 1.0}}, {{0.0, 1.0}}});
  VectorXd x = VectorXd::Zero(6);
  x(0) = 1.0;
  x(3) = 1.0;
  const VectorXd latent = targets::latent_projection(f, x);
  CHECK(latent(0) == 1.0);
  CHECK(latent(1) == 1.0);

  VectorXd orth = VectorXd::Zero(6);
  orth(5) = 2.0;
  CHECK(targets::latent_projection(f, orth).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("c0/c1 closed forms") {
  MatrixXd U = MatrixXd::Zero(1, 4);
  U(0, 1) = 1.0;
  const auto f = targets::make_target(U, {{{0.3, 0.7, 0.1}}});
  const double norm = std::sqrt(0.3 * 0.3 + 0.7 * 0.7 + 0.1 * 0.1 * 2.0);
  CHECK(targets::c0_coefficient(f) == doctest::Approx(0.3 / norm).epsilon(1e-12));
  const VectorXd c1 = targets::c1_coefficient(f);
  CHECK(c1(1) == doctest::Approx(0.7 / norm).epsilon(1e-12));
  CHECK(c1(0) == 0.0);
}

TEST_CASE("Monte Carlo unit norm (Parseval)") {
  const auto f = experiment_target();
  const long n = 400000;
  MatrixXd X(n, 10);
  kernels::fill_gaussian_rows(33, "x", X);
  VectorXd values;
  targets::eval_target_batch(f, X, values);
  const auto sums = kernels::chunked_accumulate<2>(n, [&](long i, std::array<double, 2>& acc) {
    const double sq = values(i) * values(i);
    acc[0] += sq;
    acc[1] += sq * sq;
  });
  const double mean = sums[0] / static_cast<double>(n);
  const double var = std::max(0.0, sums[1] / static_cast<double>(n) - mean * mean);
  const double se = std::sqrt(var / static_cast<double>(n));
  CHECK(std::abs(mean - 1.0) <= 3.0 * se);
}

TEST_CASE("finite-difference Hessian oracle agrees with the closed form") {
  const int d = 6;
  const auto f = experiment_target(d);
  const auto summary = targets::expected_hessian(f);

  const long n = 20000;
  MatrixXd X(n, d);
  kernels::fill_gaussian_rows(91, "x", X);
  const double h = 1e-3;

  MatrixXd mean = MatrixXd::Zero(d, d);
  MatrixXd second = MatrixXd::Zero(d, d);
  for (long i = 0; i < n; ++i) {
    const VectorXd x = X.row(i).transpose();
    for (int a = 0; a < d; ++a) {
      for (int b = a; b < d; ++b) {
        VectorXd xpp = x, xpm = x, xmp = x, xmm = x;
        xpp(a) += h; xpp(b) += h;
        xpm(a) += h; xpm(b) -= h;
        xmp(a) -= h; xmp(b) += h;
        xmm(a) -= h; xmm(b) -= h;
        const double value = (targets::eval_target(f, xpp) - targets::eval_target(f, xpm) -
                              targets::eval_target(f, xmp) + targets::eval_target(f, xmm)) /
                             (4.0 * h * h);
        mean(a, b) += value;
        second(a, b) += value * value;
      }
    }
  }
  for (int a = 0; a < d; ++a) {
    for (int b = a; b < d; ++b) {
      const double avg = mean(a, b) / static_cast<double>(n);
      const double var =
          std::max(0.0, second(a, b) / static_cast<double>(n) - avg * avg);
      const double se = std::sqrt(var / static_cast<double>(n));
      // 3 sigma plus the O(h^2) finite-difference bias.
      CHECK(std::abs(avg - summary.H(a, b)) <= 3.0 * se + 1e-4);
    }
  }
}
