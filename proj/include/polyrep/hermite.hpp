#pragma once

// Probabilist's Hermite polynomials He_k (He_0 = 1, He_1 = x,
// He_{k+1} = x He_k - k He_{k-1}), orthogonal under N(0,1) with
// E[He_j He_k] = delta_jk * k!.

#include <span>
#include <vector>

namespace polyrep::hermite {

inline constexpr int kDefaultMaxDegree = 8;

double factorial(int k);
// (-1)!! = 0!! = 1.
double double_factorial(int k);
double binomial(int n, int k);

// He_k(x) by the three-term recurrence.
double he_eval(int k, double x);

// Fills out[0..kmax] with He_0(x)..He_kmax(x) in one recurrence pass.
void he_eval_all(int kmax, double x, std::span<double> out);

// Coefficients of a series sum_k coeffs[k] * He_k(x).
struct HermiteSeries {
  std::vector<double> coeffs;

  int max_degree() const { return static_cast<int>(coeffs.size()) - 1; }
};

double series_eval(const HermiteSeries& s, double x);

// Parseval: sum_k coeffs[k]^2 * k!.
double series_l2_norm_sq(const HermiteSeries& s);

// c_k in relu(x) = sum_k (c_k / k!) He_k(x):
//   c_0 = 1/sqrt(2*pi), c_1 = 1/2, c_k = 0 for odd k >= 3,
//   c_{2j} = (-1)^{j-1} (2j-1)!! / (sqrt(2*pi) (2j-1)) for j >= 1.
double relu_hermite_coeff(int k);

// x^k = sum_{l<=k} out[l] * He_l(x); out[l] = (k-l-1)!! * C(k,l) for even k-l.
std::vector<double> monomial_to_hermite(int k);

// E_{w~N(0,I)}[prod_i w_i^{c_i}] = prod_i (c_i - 1)!! if all c_i even, else 0.
double gaussian_monomial_moment(std::span<const int> exponents);

// Nodes/weights for integrals against the standard normal density:
// integral f dN(0,1) ~= sum_i weights[i] * f(nodes[i]). Exact for polynomials
// of degree <= 2*npoints - 1.
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussHermiteRule gauss_hermite(int npoints);

// Gauss-Legendre nodes/weights on [-1, 1] (weights sum to 2); used by oracle
// integrals over finite intervals.
GaussHermiteRule gauss_legendre(int npoints);

}  // namespace polyrep::hermite
