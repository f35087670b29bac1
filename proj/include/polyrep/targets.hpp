#pragma once

// Additive-ridge targets f(x) = sum_t g_t(u_t . x) with orthonormal rows u_t.
// The Hermite coefficients of each g_t give closed forms for the expected
// Hessian, the derivative tensors C_k, and the L2 normalization.

#include <Eigen/Dense>
#include <vector>

#include "polyrep/hermite.hpp"

namespace polyrep::targets {

struct TargetFunction {
  Eigen::MatrixXd U;  // r x d, orthonormal rows
  std::vector<hermite::HermiteSeries> components;
  int d = 0;
  int r = 0;

  int max_degree() const;
};

struct HessianSummary {
  Eigen::MatrixXd H;  // d x d, symmetric
  int rank = 0;
  double kappa = 0.0;
  Eigen::MatrixXd principal_basis;  // d x rank
};

// Validates orthonormality (tolerance 1e-10), tightens it with a
// Gram-Schmidt pass, and rescales all components by one global factor so that
// sum_t ||g_t||^2 = 1.
TargetFunction make_target(Eigen::MatrixXd U,
                           std::vector<hermite::HermiteSeries> components,
                           int p_max = hermite::kDefaultMaxDegree);

double eval_target(const TargetFunction& f, const Eigen::VectorXd& x);
void eval_target_batch(const TargetFunction& f, const Eigen::MatrixXd& X,
                       Eigen::VectorXd& out);

// H = sum_t 2 a_{t,2} u_t u_t^T; eigenvalues below 1e-10 * ||H|| count as zero.
HessianSummary expected_hessian(const TargetFunction& f);

struct CkTerm {
  double scale;  // k! * a_{t,k}
  int t;
};

// Factored C_k = sum over returned terms of scale * u_t^{(x) k}. Terms with a
// zero coefficient are omitted.
std::vector<CkTerm> ck_coefficient(const TargetFunction& f, int k);

Eigen::VectorXd latent_projection(const TargetFunction& f, const Eigen::VectorXd& x);

// C_0 and C_1 in closed form (used for analytic centering).
double c0_coefficient(const TargetFunction& f);
Eigen::VectorXd c1_coefficient(const TargetFunction& f);

}  // namespace polyrep::targets
