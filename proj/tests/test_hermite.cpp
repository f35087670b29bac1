#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "polyrep/hermite.hpp"

using namespace polyrep;

namespace {
const double kInvSqrt2Pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);

// Quadrature oracle for c_k = E[relu(x) He_k(x)]: integral over [0, 12] where
// the Gaussian tail is ~1e-31.
double relu_coeff_oracle(int k) {
  const auto rule = hermite::gauss_legendre(120);
  const double upper = 12.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double x = 0.5 * upper * (rule.nodes[i] + 1.0);
    const double w = 0.5 * upper * rule.weights[i];
    acc += w * x * hermite::he_eval(k, x) * std::exp(-0.5 * x * x) * kInvSqrt2Pi;
  }
  return acc;
}
}  // namespace

TEST_CASE("he_eval recurrence values") {
  CHECK(hermite::he_eval(0, 1.7) == 1.0);
  CHECK(hermite::he_eval(1, -0.3) == -0.3);
  CHECK(hermite::he_eval(2, 2.0) == doctest::Approx(3.0).epsilon(1e-14));  // x^2 - 1
  CHECK(hermite::he_eval(3, 2.0) == doctest::Approx(2.0).epsilon(1e-14));  // x^3 - 3x
  CHECK(hermite::he_eval(4, 0.0) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(hermite::he_eval(2, 0.0) == doctest::Approx(-1.0).epsilon(1e-14));
}

TEST_CASE("he_eval_all matches he_eval") {
  std::vector<double> all(9);
  hermite::he_eval_all(8, 1.3, all);
  for (int k = 0; k <= 8; ++k) CHECK(all[k] == hermite::he_eval(k, 1.3));
}

TEST_CASE("series_eval") {
  CHECK(hermite::series_eval({{0.0, 0.0, 0.5}}, 0.0) == doctest::Approx(-0.5));
  CHECK(hermite::series_eval({{3.25}}, 17.0) == 3.25);
  const double quartic = 1.0 / (4.0 * std::sqrt(3.0));
  // He_2(0) = -1, He_4(0) = 3.
  CHECK(hermite::series_eval({{0.0, 0.0, 0.5, 0.0, quartic}}, 0.0) ==
        doctest::Approx(-0.5 + 3.0 * quartic).epsilon(1e-14));
  CHECK(-0.5 + 3.0 * quartic == doctest::Approx(-0.0669872981).epsilon(1e-8));
}

TEST_CASE("series_l2_norm_sq via Parseval") {
  const double quartic = 1.0 / (4.0 * std::sqrt(3.0));
  CHECK(hermite::series_l2_norm_sq({{0.0, 0.0, 0.5, 0.0, quartic}}) ==
        doctest::Approx(1.0).epsilon(1e-14));
  CHECK(hermite::series_l2_norm_sq({{0.0, 1.0}}) == 1.0);
  CHECK(hermite::series_l2_norm_sq({{0.0, 0.0, 1.0}}) == 2.0);
}

TEST_CASE("relu Hermite coefficients") {
  CHECK(hermite::relu_hermite_coeff(0) == doctest::Approx(0.3989422804014327).epsilon(1e-14));
  CHECK(hermite::relu_hermite_coeff(1) == 0.5);
  CHECK(hermite::relu_hermite_coeff(2) == doctest::Approx(kInvSqrt2Pi).epsilon(1e-14));
  CHECK(hermite::relu_hermite_coeff(3) == 0.0);
  CHECK(hermite::relu_hermite_coeff(5) == 0.0);
  CHECK(hermite::relu_hermite_coeff(4) == doctest::Approx(-kInvSqrt2Pi).epsilon(1e-14));
  CHECK(hermite::relu_hermite_coeff(6) == doctest::Approx(3.0 * kInvSqrt2Pi).epsilon(1e-14));
}

TEST_CASE("relu coefficients match the quadrature oracle to 1e-8") {
  for (int k = 0; k <= 8; ++k)
    CHECK(std::abs(hermite::relu_hermite_coeff(k) - relu_coeff_oracle(k)) <= 1e-8);
}

TEST_CASE("orthogonality under the Gaussian by quadrature") {
  const auto rule = hermite::gauss_hermite(20);
  std::vector<double> he(9);
  for (int j = 0; j <= 8; ++j) {
    for (int k = j; k <= 8; ++k) {
      double acc = 0.0;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        hermite::he_eval_all(8, rule.nodes[i], he);
        acc += rule.weights[i] * he[j] * he[k];
      }
      const double expected = j == k ? hermite::factorial(k) : 0.0;
      CHECK(std::abs(acc - expected) <= 1e-8);
    }
  }
}

TEST_CASE("monomial_to_hermite coefficients") {
  const auto k2 = hermite::monomial_to_hermite(2);
  CHECK(k2 == std::vector<double>{1.0, 0.0, 1.0});
  const auto k1 = hermite::monomial_to_hermite(1);
  CHECK(k1 == std::vector<double>{0.0, 1.0});
  const auto k4 = hermite::monomial_to_hermite(4);
  CHECK(k4 == std::vector<double>{3.0, 0.0, 6.0, 0.0, 1.0});
}

TEST_CASE("monomial round trip on a grid") {
  for (int k = 0; k <= 8; ++k) {
    const hermite::HermiteSeries series{hermite::monomial_to_hermite(k)};
    for (int i = 0; i <= 20; ++i) {
      const double x = -3.0 + 0.3 * i;
      CHECK(std::abs(hermite::series_eval(series, x) - std::pow(x, k)) <= 1e-10);
    }
  }
}

TEST_CASE("relu reconstruction improves with the truncation degree") {
  auto max_error = [](int K) {
    double worst = 0.0;
    for (int i = 0; i <= 80; ++i) {
      const double x = -2.0 + 0.05 * i;
      double acc = 0.0;
      for (int k = 0; k <= K; ++k)
        acc += hermite::relu_hermite_coeff(k) / hermite::factorial(k) * hermite::he_eval(k, x);
      worst = std::max(worst, std::abs(acc - std::max(0.0, x)));
    }
    return worst;
  };
  const double e4 = max_error(4);
  const double e8 = max_error(8);
  const double e16 = max_error(16);
  CHECK(e4 > e8);
  CHECK(e8 > e16);
  CHECK(e16 < 0.1);
}

TEST_CASE("gaussian monomial moments") {
  const int quartic[] = {4};
  const int odd[] = {1, 2};
  const int pair[] = {2, 2};
  CHECK(hermite::gaussian_monomial_moment(quartic) == 3.0);
  CHECK(hermite::gaussian_monomial_moment(odd) == 0.0);
  CHECK(hermite::gaussian_monomial_moment(pair) == 1.0);
  const int six[] = {6, 0, 2};
  CHECK(hermite::gaussian_monomial_moment(six) == 15.0);
}

TEST_CASE("gauss_hermite integrates Gaussian moments exactly") {
  const auto rule = hermite::gauss_hermite(8);
  double mass = 0.0, second = 0.0, fourth = 0.0, sixth = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    mass += rule.weights[i];
    second += rule.weights[i] * rule.nodes[i] * rule.nodes[i];
    fourth += rule.weights[i] * std::pow(rule.nodes[i], 4);
    sixth += rule.weights[i] * std::pow(rule.nodes[i], 6);
  }
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(second == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fourth == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(sixth == doctest::Approx(15.0).epsilon(1e-12));
}

TEST_CASE("gauss_legendre integrates polynomials on [-1,1]") {
  const auto rule = hermite::gauss_legendre(10);
  double mass = 0.0, second = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    mass += rule.weights[i];
    second += rule.weights[i] * rule.nodes[i] * rule.nodes[i];
  }
  CHECK(mass == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(second == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("helpers") {
  CHECK(hermite::factorial(0) == 1.0);
  CHECK(hermite::factorial(5) == 120.0);
  CHECK(hermite::double_factorial(-1) == 1.0);
  CHECK(hermite::double_factorial(0) == 1.0);
  CHECK(hermite::double_factorial(5) == 15.0);
  CHECK(hermite::double_factorial(6) == 48.0);
  CHECK(hermite::binomial(8, 3) == 56.0);
  CHECK(hermite::binomial(4, 0) == 1.0);
}
