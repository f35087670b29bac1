#include "polyrep/targets.hpp"

#include <cmath>

#include "polyrep/errors.hpp"

namespace polyrep::targets {

int TargetFunction::max_degree() const {
  int p = 0;
  for (const auto& g : components) {
    for (int k = g.max_degree(); k >= 0; --k) {
      if (g.coeffs[k] != 0.0) {
        p = std::max(p, k);
        break;
      }
    }
  }
  return p;
}

TargetFunction make_target(Eigen::MatrixXd U,
                           std::vector<hermite::HermiteSeries> components,
                           int p_max) {
  const int r = static_cast<int>(U.rows());
  const int d = static_cast<int>(U.cols());
  if (r < 1 || d < 1) throw DimensionMismatch("make_target: empty U");
  if (r > d) throw DimensionMismatch("make_target: r > d");
  if (static_cast<int>(components.size()) != r)
    throw DimensionMismatch("make_target: one component per direction required");
  for (const auto& g : components) {
    if (g.max_degree() > p_max)
      throw DimensionMismatch("make_target: component degree exceeds p_max");
  }

  const Eigen::MatrixXd gram = U * U.transpose();
  const double deviation = (gram - Eigen::MatrixXd::Identity(r, r)).cwiseAbs().maxCoeff();
  if (deviation > 1e-10)
    throw NonOrthonormalDirections("make_target: U rows deviate from orthonormal by " +
                                   std::to_string(deviation));
  // Tighten to machine precision, keeping row order so each g_t stays attached
  // to its direction.
  for (int t = 0; t < r; ++t) {
    for (int s = 0; s < t; ++s) U.row(t) -= U.row(t).dot(U.row(s)) * U.row(s);
    U.row(t) /= U.row(t).norm();
  }

  double total = 0.0;
  for (const auto& g : components) total += hermite::series_l2_norm_sq(g);
  if (total == 0.0) throw ZeroFunction("make_target: all components vanish");
  const double scale = 1.0 / std::sqrt(total);
  for (auto& g : components)
    for (auto& c : g.coeffs) c *= scale;

  TargetFunction f;
  f.U = std::move(U);
  f.components = std::move(components);
  f.d = d;
  f.r = r;
  return f;
}

double eval_target(const TargetFunction& f, const Eigen::VectorXd& x) {
  if (x.size() != f.d) throw DimensionMismatch("eval_target: wrong input dimension");
  double acc = 0.0;
  for (int t = 0; t < f.r; ++t)
    acc += hermite::series_eval(f.components[t], f.U.row(t).dot(x));
  return acc;
}

void eval_target_batch(const TargetFunction& f, const Eigen::MatrixXd& X,
                       Eigen::VectorXd& out) {
  if (X.cols() != f.d) throw DimensionMismatch("eval_target_batch: wrong input dimension");
  const long n = X.rows();
  out.resize(n);
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int t = 0; t < f.r; ++t)
      acc += hermite::series_eval(f.components[t], f.U.row(t).dot(X.row(i)));
    out(i) = acc;
  }
}

HessianSummary expected_hessian(const TargetFunction& f) {
  HessianSummary summary;
  summary.H = Eigen::MatrixXd::Zero(f.d, f.d);
  for (int t = 0; t < f.r; ++t) {
    const auto& g = f.components[t];
    if (g.max_degree() < 2 || g.coeffs[2] == 0.0) continue;
    summary.H += (2.0 * g.coeffs[2]) * (f.U.row(t).transpose() * f.U.row(t));
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(summary.H);
  const Eigen::VectorXd eigs = solver.eigenvalues();
  const double norm = eigs.cwiseAbs().maxCoeff();
  const double threshold = 1e-10 * norm;
  double min_nonzero = 0.0;
  std::vector<int> kept;
  for (int i = 0; i < f.d; ++i) {
    const double mag = std::abs(eigs(i));
    if (norm > 0.0 && mag > threshold) {
      kept.push_back(i);
      min_nonzero = min_nonzero == 0.0 ? mag : std::min(min_nonzero, mag);
    }
  }
  summary.rank = static_cast<int>(kept.size());
  summary.principal_basis.resize(f.d, summary.rank);
  for (int i = 0; i < summary.rank; ++i)
    summary.principal_basis.col(i) = solver.eigenvectors().col(kept[i]);
  // ||H^dagger|| / sqrt(r); the pseudo-inverse of the zero matrix is zero.
  summary.kappa = summary.rank == 0 ? 0.0 : 1.0 / (min_nonzero * std::sqrt(static_cast<double>(f.r)));
  return summary;
}

std::vector<CkTerm> ck_coefficient(const TargetFunction& f, int k) {
  if (k < 0) throw DimensionMismatch("ck_coefficient: negative degree");
  std::vector<CkTerm> terms;
  const double kfact = hermite::factorial(k);
  for (int t = 0; t < f.r; ++t) {
    const auto& g = f.components[t];
    if (g.max_degree() < k || g.coeffs[k] == 0.0) continue;
    terms.push_back({kfact * g.coeffs[k], t});
  }
  return terms;
}

Eigen::VectorXd latent_projection(const TargetFunction& f, const Eigen::VectorXd& x) {
  if (x.size() != f.d) throw DimensionMismatch("latent_projection: wrong input dimension");
  return f.U * x;
}

double c0_coefficient(const TargetFunction& f) {
  double c = 0.0;
  for (const auto& g : f.components)
    if (g.max_degree() >= 0 && !g.coeffs.empty()) c += g.coeffs[0];
  return c;
}

Eigen::VectorXd c1_coefficient(const TargetFunction& f) {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(f.d);
  for (int t = 0; t < f.r; ++t) {
    const auto& g = f.components[t];
    if (g.max_degree() >= 1 && g.coeffs[1] != 0.0) c += g.coeffs[1] * f.U.row(t).transpose();
  }
  return c;
}

}  // namespace polyrep::targets
