#include "polyrep/hermite.hpp"

#include <Eigen/Dense>
#include <cassert>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace polyrep::hermite {

double factorial(int k) {
  assert(k >= 0);
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

double double_factorial(int k) {
  if (k <= 0) return 1.0;  // covers (-1)!! and 0!!
  double f = 1.0;
  for (int i = k; i >= 2; i -= 2) f *= i;
  return f;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double c = 1.0;
  for (int i = 0; i < k; ++i) c = c * (n - i) / (i + 1);
  return std::round(c);
}

double he_eval(int k, double x) {
  if (k < 0) throw std::invalid_argument("he_eval: negative degree");
  if (k == 0) return 1.0;
  double prev = 1.0;  // He_0
  double cur = x;     // He_1
  for (int j = 1; j < k; ++j) {
    const double next = x * cur - j * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

void he_eval_all(int kmax, double x, std::span<double> out) {
  assert(static_cast<int>(out.size()) >= kmax + 1);
  out[0] = 1.0;
  if (kmax == 0) return;
  out[1] = x;
  for (int j = 1; j < kmax; ++j) out[j + 1] = x * out[j] - j * out[j - 1];
}

double series_eval(const HermiteSeries& s, double x) {
  if (s.coeffs.empty()) return 0.0;
  double acc = s.coeffs[0];
  double prev = 1.0;
  double cur = x;
  for (int k = 1; k <= s.max_degree(); ++k) {
    acc += s.coeffs[k] * cur;
    const double next = x * cur - k * prev;
    prev = cur;
    cur = next;
  }
  return acc;
}

double series_l2_norm_sq(const HermiteSeries& s) {
  double acc = 0.0;
  double kfact = 1.0;
  for (int k = 0; k <= s.max_degree(); ++k) {
    if (k > 0) kfact *= k;
    acc += s.coeffs[k] * s.coeffs[k] * kfact;
  }
  return acc;
}

double relu_hermite_coeff(int k) {
  if (k < 0) throw std::invalid_argument("relu_hermite_coeff: negative degree");
  const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  if (k == 0) return inv_sqrt_2pi;
  if (k == 1) return 0.5;
  if (k % 2 == 1) return 0.0;
  const int j = k / 2;
  const double sign = (j % 2 == 1) ? 1.0 : -1.0;  // (-1)^{j-1}
  return sign * double_factorial(2 * j - 1) / (2 * j - 1) * inv_sqrt_2pi;
}

std::vector<double> monomial_to_hermite(int k) {
  if (k < 0) throw std::invalid_argument("monomial_to_hermite: negative degree");
  std::vector<double> out(k + 1, 0.0);
  for (int l = k; l >= 0; l -= 2) out[l] = double_factorial(k - l - 1) * binomial(k, l);
  return out;
}

double gaussian_monomial_moment(std::span<const int> exponents) {
  double m = 1.0;
  for (int c : exponents) {
    if (c < 0) throw std::invalid_argument("gaussian_monomial_moment: negative exponent");
    if (c % 2 == 1) return 0.0;
    m *= double_factorial(c - 1);
  }
  return m;
}

GaussHermiteRule gauss_hermite(int npoints) {
  if (npoints < 1) throw std::invalid_argument("gauss_hermite: need >= 1 point");
  // Golub-Welsch on the Jacobi matrix of the probabilist's recurrence:
  // diagonal 0, off-diagonal sqrt(k).
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(npoints, npoints);
  for (int k = 1; k < npoints; ++k) {
    const double offdiag = std::sqrt(static_cast<double>(k));
    jacobi(k, k - 1) = offdiag;
    jacobi(k - 1, k) = offdiag;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  GaussHermiteRule rule;
  rule.nodes.resize(npoints);
  rule.weights.resize(npoints);
  for (int i = 0; i < npoints; ++i) {
    rule.nodes[i] = solver.eigenvalues()(i);
    const double first = solver.eigenvectors()(0, i);
    rule.weights[i] = first * first;  // total mass of N(0,1) is 1
  }
  return rule;
}

GaussHermiteRule gauss_legendre(int npoints) {
  if (npoints < 1) throw std::invalid_argument("gauss_legendre: need >= 1 point");
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(npoints, npoints);
  for (int k = 1; k < npoints; ++k) {
    const double offdiag = k / std::sqrt(4.0 * k * k - 1.0);
    jacobi(k, k - 1) = offdiag;
    jacobi(k - 1, k) = offdiag;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  GaussHermiteRule rule;
  rule.nodes.resize(npoints);
  rule.weights.resize(npoints);
  for (int i = 0; i < npoints; ++i) {
    rule.nodes[i] = solver.eigenvalues()(i);
    const double first = solver.eigenvectors()(0, i);
    rule.weights[i] = 2.0 * first * first;
  }
  return rule;
}

}  // namespace polyrep::hermite
