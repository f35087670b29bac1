#pragma once

// Constructive correlational-statistical-query machinery: quasi-orthogonal
// direction sets with an exhaustive certificate, the hard single-index Hermite
// class, exact pairwise correlations, query/tolerance bound formulas, and an
// elimination-game adversary.

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace polyrep::csq {

struct HardClass {
  Eigen::MatrixXd directions;  // M x d, unit rows
  int degree = 0;
  double epsilon_cert = 0.0;  // certified max pairwise |v_i . v_j|

  long size() const { return directions.rows(); }
};

// Greedy rejection sampling: keep a fresh uniform unit vector iff its inner
// products with everything kept so far stay within epsilon. Throws
// ConstructionFailed once max_restarts * M candidates have been drawn.
Eigen::MatrixXd build_quasi_orthogonal_set(int d, int M, double epsilon, std::uint64_t seed,
                                           int max_restarts = 50);

// Exhaustive max over pairs; the certificate recomputation.
double certify_max_correlation(const Eigen::MatrixXd& directions);

HardClass make_hard_class(int d, int M, double epsilon, int degree, std::uint64_t seed,
                          int max_restarts = 50);

// He_p(v_i . x) / sqrt(p!).
double hard_fn_eval(const HardClass& cls, int index, const Eigen::VectorXd& x);

// E[f_u f_v] = (u . v)^p for unit u, v.
double pairwise_correlation(const Eigen::VectorXd& u, const Eigen::VectorXd& v, int p);

// M (tau^2 - epsilon) / 2; zero when the bound is vacuous (tau^2 <= epsilon).
double csq_query_lower_bound(long M, double tau, double epsilon);

// (ln(q d))^{p/4} / d^{p/4}.
double tolerance_bound(double q, long d, int p);

struct Query {
  Eigen::VectorXd direction;  // unit
  int degree = 0;             // must match the class degree
};

struct GameResult {
  std::vector<int> survivors;
  std::vector<int> eliminated_per_query;
};

// Answers every query with 0 and eliminates the class members whose exact
// correlation with the query exceeds tau in magnitude. While two or more
// members survive, the transcript is consistent with both.
GameResult adversary_game(const HardClass& cls, const std::vector<Query>& queries, double tau);

}  // namespace polyrep::csq
