#include "polyrep/csq.hpp"

#include <cmath>

#include "polyrep/errors.hpp"
#include "polyrep/hermite.hpp"
#include "polyrep/rng.hpp"

namespace polyrep::csq {

Eigen::MatrixXd build_quasi_orthogonal_set(int d, int M, double epsilon, std::uint64_t seed,
                                           int max_restarts) {
  if (M < 1) throw DimensionMismatch("build_quasi_orthogonal_set: need M >= 1");
  if (d < 1) throw DimensionMismatch("build_quasi_orthogonal_set: need d >= 1");
  if (epsilon <= 0.0 || epsilon >= 1.0)
    throw DimensionMismatch("build_quasi_orthogonal_set: epsilon must be in (0,1)");

  rng::Stream stream(rng::derive_seed(seed, "qorth"));
  Eigen::MatrixXd kept(M, d);
  int nkept = 0;
  const long budget = static_cast<long>(max_restarts) * M;
  for (long draws = 0; nkept < M; ++draws) {
    if (draws >= budget)
      throw ConstructionFailed("build_quasi_orthogonal_set: budget of " + std::to_string(budget) +
                               " candidates exhausted with " + std::to_string(nkept) + "/" +
                               std::to_string(M) + " kept (M too large for this d, epsilon)");
    Eigen::VectorXd v(d);
    for (int k = 0; k < d; ++k) v(k) = stream.next_gaussian();
    v /= v.norm();
    bool ok = true;
    for (int i = 0; i < nkept && ok; ++i) ok = std::abs(kept.row(i).dot(v)) <= epsilon;
    if (ok) kept.row(nkept++) = v.transpose();
  }
  return kept;
}

double certify_max_correlation(const Eigen::MatrixXd& directions) {
  const long M = directions.rows();
  double worst = 0.0;
#pragma omp parallel for schedule(dynamic, 4) reduction(max : worst)
  for (long i = 0; i < M; ++i)
    for (long j = i + 1; j < M; ++j)
      worst = std::max(worst, std::abs(directions.row(i).dot(directions.row(j))));
  return worst;
}

HardClass make_hard_class(int d, int M, double epsilon, int degree, std::uint64_t seed,
                          int max_restarts) {
  if (degree < 0) throw DimensionMismatch("make_hard_class: negative degree");
  HardClass cls;
  cls.directions = build_quasi_orthogonal_set(d, M, epsilon, seed, max_restarts);
  cls.degree = degree;
  cls.epsilon_cert = certify_max_correlation(cls.directions);
  return cls;
}

double hard_fn_eval(const HardClass& cls, int index, const Eigen::VectorXd& x) {
  if (index < 0 || index >= cls.size())
    throw IndexOutOfRange("hard_fn_eval: index out of range");
  if (x.size() != cls.directions.cols())
    throw DimensionMismatch("hard_fn_eval: wrong input dimension");
  return hermite::he_eval(cls.degree, cls.directions.row(index).dot(x)) /
         std::sqrt(hermite::factorial(cls.degree));
}

double pairwise_correlation(const Eigen::VectorXd& u, const Eigen::VectorXd& v, int p) {
  if (u.size() != v.size()) throw DimensionMismatch("pairwise_correlation: dimension mismatch");
  if (std::abs(u.norm() - 1.0) > 1e-10 || std::abs(v.norm() - 1.0) > 1e-10)
    throw DimensionMismatch("pairwise_correlation: inputs must be unit vectors");
  return std::pow(u.dot(v), p);
}

double csq_query_lower_bound(long M, double tau, double epsilon) {
  const double margin = tau * tau - epsilon;
  if (margin <= 0.0) return 0.0;
  return static_cast<double>(M) * margin / 2.0;
}

double tolerance_bound(double q, long d, int p) {
  if (q * static_cast<double>(d) <= 1.0)
    throw DomainError("tolerance_bound: need q * d > 1");
  const double exponent = static_cast<double>(p) / 4.0;
  return std::pow(std::log(q * static_cast<double>(d)), exponent) /
         std::pow(static_cast<double>(d), exponent);
}

GameResult adversary_game(const HardClass& cls, const std::vector<Query>& queries, double tau) {
  const long M = cls.size();
  std::vector<bool> alive(static_cast<std::size_t>(M), true);
  GameResult result;
  result.eliminated_per_query.reserve(queries.size());
  for (const Query& query : queries) {
    if (query.degree != cls.degree)
      throw DimensionMismatch("adversary_game: query degree must match the class degree");
    if (query.direction.size() != cls.directions.cols())
      throw DimensionMismatch("adversary_game: query dimension mismatch");
    int eliminated = 0;
    for (long i = 0; i < M; ++i) {
      if (!alive[static_cast<std::size_t>(i)]) continue;
      const double corr =
          std::pow(cls.directions.row(i).dot(query.direction), cls.degree);
      if (std::abs(corr) > tau) {
        alive[static_cast<std::size_t>(i)] = false;
        ++eliminated;
      }
    }
    result.eliminated_per_query.push_back(eliminated);
  }
  for (long i = 0; i < M; ++i)
    if (alive[static_cast<std::size_t>(i)]) result.survivors.push_back(static_cast<int>(i));
  return result;
}

}  // namespace polyrep::csq
