#include "polyrep/validate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "polyrep/baselines.hpp"
#include "polyrep/csq.hpp"
#include "polyrep/diagnostics.hpp"
#include "polyrep/hermite.hpp"
#include "polyrep/kernels.hpp"
#include "polyrep/network.hpp"
#include "polyrep/rng.hpp"
#include "polyrep/targets.hpp"
#include "polyrep/trainer.hpp"

namespace polyrep::validate {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

targets::TargetFunction reference_target(int d = 10) {
  MatrixXd U = MatrixXd::Zero(1, d);
  U(0, 0) = 1.0;
  return targets::make_target(U, {{{0.0, 0.0, 0.5, 0.0, 1.0 / (4.0 * std::sqrt(3.0))}}});
}

double relu_coeff(int k, const FaultInjection& fault) {
  return hermite::relu_hermite_coeff(k) + (k == 2 ? fault.relu_coeff_bias : 0.0);
}

void check_hermite_orthogonality(std::vector<CheckResult>& out) {
  const auto rule = hermite::gauss_hermite(20);
  double worst = 0.0;
  std::vector<double> he(9);
  for (int j = 0; j <= 8; ++j) {
    for (int k = j; k <= 8; ++k) {
      double integral = 0.0;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        hermite::he_eval_all(8, rule.nodes[i], he);
        integral += rule.weights[i] * he[static_cast<std::size_t>(j)] * he[static_cast<std::size_t>(k)];
      }
      const double expected = j == k ? hermite::factorial(k) : 0.0;
      worst = std::max(worst, std::abs(integral - expected));
    }
  }
  out.push_back({"hermite_orthogonality_quadrature", worst <= 1e-8, worst,
                 "max |<He_j,He_k> - delta j!| for j,k <= 8"});
}

void check_relu_coeff_quadrature(std::vector<CheckResult>& out, const FaultInjection& fault) {
  // c_k = E[relu(x) He_k(x)] = int_0^L x He_k(x) phi(x) dx up to a 1e-30 tail.
  const auto rule = hermite::gauss_legendre(120);
  const double upper = 12.0;
  double worst = 0.0;
  for (int k = 0; k <= 8; ++k) {
    double integral = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double x = 0.5 * upper * (rule.nodes[i] + 1.0);
      const double weight = 0.5 * upper * rule.weights[i];
      const double density = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
      integral += weight * x * hermite::he_eval(k, x) * density;
    }
    worst = std::max(worst, std::abs(relu_coeff(k, fault) - integral));
  }
  out.push_back({"relu_coeff_vs_quadrature", worst <= 1e-8, worst,
                 "max |c_k - quadrature| for k <= 8"});
}

void check_monomial_roundtrip(std::vector<CheckResult>& out) {
  double worst = 0.0;
  for (int k = 0; k <= 8; ++k) {
    const hermite::HermiteSeries series{hermite::monomial_to_hermite(k)};
    for (int i = 0; i <= 20; ++i) {
      const double x = -3.0 + 0.3 * i;
      worst = std::max(worst, std::abs(hermite::series_eval(series, x) - std::pow(x, k)));
    }
  }
  out.push_back({"monomial_to_hermite_roundtrip", worst <= 1e-10, worst,
                 "max |series(x) - x^k| on [-3,3], k <= 8"});
}

void check_relu_reconstruction(std::vector<CheckResult>& out, const FaultInjection& fault) {
  auto truncation_error = [&](int K) {
    double worst = 0.0;
    for (int i = 0; i <= 80; ++i) {
      const double x = -2.0 + 0.05 * i;
      double acc = 0.0;
      for (int k = 0; k <= K; ++k) acc += relu_coeff(k, fault) / hermite::factorial(k) * hermite::he_eval(k, x);
      worst = std::max(worst, std::abs(acc - std::max(0.0, x)));
    }
    return worst;
  };
  const double e4 = truncation_error(4);
  const double e8 = truncation_error(8);
  const double e16 = truncation_error(16);
  const bool pass = e4 > e8 && e8 > e16 && e16 < 0.1;
  out.push_back({"relu_reconstruction_monotone", pass, e16,
                 "errors K=4:" + std::to_string(e4) + " K=8:" + std::to_string(e8) +
                     " K=16:" + std::to_string(e16)});
}

void check_network_init(std::vector<CheckResult>& out) {
  const auto params = network::init_symmetric(64, 7, 11);
  rng::Stream stream(rng::derive_seed(11, "probe"));
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    VectorXd x(7);
    for (int k = 0; k < 7; ++k) x(k) = stream.next_gaussian();
    worst = std::max(worst, std::abs(network::forward(params, x)));
  }
  out.push_back({"symmetric_init_zero_output", worst == 0.0, worst,
                 "max |f(x)| over 1000 points, exact cancellation"});
}

void check_homogeneity(std::vector<CheckResult>& out) {
  auto params = network::init_symmetric(16, 5, 3);
  params.b.setZero();
  auto doubled = params;
  doubled.W *= 2.0;
  rng::Stream stream(rng::derive_seed(3, "probe"));
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    VectorXd x(5);
    for (int k = 0; k < 5; ++k) x(k) = stream.next_gaussian();
    // a is +-1 and relu(2z) = 2 relu(z), so scaling W by 2 is exact.
    worst = std::max(worst, std::abs(network::forward(doubled, x) - 2.0 * network::forward(params, x)));
  }
  out.push_back({"positive_homogeneity_exact", worst == 0.0, worst,
                 "forward(2W, b=0) == 2 forward(W, b=0)"});
}

void check_gn_scale_invariance(std::vector<CheckResult>& out) {
  const auto f = reference_target(6);
  const auto ds = data::sample_dataset(f, 200, 1.0, 17);
  const auto stats = data::preprocess(ds);
  rng::Stream stream(rng::derive_seed(17, "w"));
  VectorXd w(6);
  for (int k = 0; k < 6; ++k) w(k) = stream.next_gaussian();
  const VectorXd g1 = trainer::g_n(w, ds, stats);
  const VectorXd g2 = trainer::g_n(VectorXd(3.0 * w), ds, stats);
  const double diff = (g1 - g2).cwiseAbs().maxCoeff();
  out.push_back({"gn_scale_invariance", diff == 0.0, diff, "g_n(w) == g_n(3w) exactly"});
}

void check_first_layer_finite_difference(std::vector<CheckResult>& out) {
  const int d = 5, m = 4;
  const long n = 50;
  const auto f = reference_target(d);
  const auto ds = data::sample_dataset(f, n, 1.0, 23);
  const auto stats = data::preprocess(ds);
  const auto params = network::init_symmetric(m, d, 23);
  const double eta1 = 0.7;
  const MatrixXd W1 = trainer::first_layer_step(params, ds, stats, eta1);

  auto loss = [&](const MatrixXd& W) {
    double acc = 0.0;
    for (long i = 0; i < n; ++i) {
      double pred = 0.0;
      for (int j = 0; j < m; ++j) {
        const double z = W.row(j).dot(ds.X.row(i));
        pred += params.a(j) * std::max(0.0, z);
      }
      const double err = pred - stats.y_centered(i);
      acc += err * err;
    }
    return acc / static_cast<double>(n);
  };

  const double h = 1e-4;
  MatrixXd fd(m, d);
  for (int j = 0; j < m; ++j) {
    for (int k = 0; k < d; ++k) {
      MatrixXd plus = params.W, minus = params.W;
      plus(j, k) += h;
      minus(j, k) -= h;
      fd(j, k) = (loss(plus) - loss(minus)) / (2.0 * h);
    }
  }
  const MatrixXd expected = -eta1 * fd;
  const double rel = (W1 - expected).norm() / expected.norm();
  out.push_back({"first_layer_vs_finite_difference", rel <= 1e-5, rel,
                 "relative error of W1 against -eta1 * central differences"});
}

void check_gd_vs_ridge(std::vector<CheckResult>& out) {
  rng::Stream stream(rng::derive_seed(31, "phi"));
  const long n = 120, m = 30;
  MatrixXd phi(n, m);
  VectorXd y(n);
  for (long i = 0; i < n; ++i) {
    for (long j = 0; j < m; ++j) phi(i, j) = stream.next_gaussian();
    y(i) = stream.next_gaussian();
  }
  const double lambda = 0.1;
  const VectorXd closed = trainer::ridge_closed_form(phi, y, lambda);
  const VectorXd gd =
      trainer::train_head_gd(phi, y, VectorXd::Zero(m), 0.0, lambda, 20000, 1e-14);
  const double rel = (closed - gd).norm() / closed.norm();
  out.push_back({"gd_matches_closed_form_ridge", rel <= 1e-6, rel,
                 "relative distance after convergence"});
}

void check_ridge_monotone_path(std::vector<CheckResult>& out) {
  rng::Stream stream(rng::derive_seed(37, "phi"));
  const long n = 100, m = 20;
  MatrixXd phi(n, m);
  VectorXd y(n);
  for (long i = 0; i < n; ++i) {
    for (long j = 0; j < m; ++j) phi(i, j) = stream.next_gaussian();
    y(i) = stream.next_gaussian();
  }
  double prev = -1.0;
  double worst_drop = 0.0;
  for (double lambda : trainer::default_lambda_grid()) {
    const VectorXd a = trainer::ridge_closed_form(phi, y, lambda);
    const double loss = (phi * a - y).squaredNorm() / static_cast<double>(n);
    if (prev >= 0.0) worst_drop = std::max(worst_drop, prev - loss);
    prev = loss;
  }
  out.push_back({"ridge_training_loss_monotone_in_lambda", worst_drop <= 1e-12, worst_drop,
                 "largest decrease along the ascending lambda path"});
}

void check_holdout_argmin(std::vector<CheckResult>& out) {
  const auto f = reference_target(8);
  trainer::TrainConfig cfg;
  cfg.holdout_n = 500;
  const auto ds = data::sample_dataset(f, 300, 1.0, 41);
  const auto holdout = data::sample_dataset(f, 500, 1.0, 42);
  auto params = network::init_symmetric(32, 8, 43);
  params.b = trainer::reinit_biases(params, 43);
  const auto stats = data::preprocess(ds);
  const auto grid = trainer::default_lambda_grid();
  const auto choice = trainer::tune_lambda(params, ds, stats, holdout, grid, cfg);
  double best = choice.holdout_risks[0];
  for (double risk : choice.holdout_risks) best = std::min(best, risk);
  double selected_risk = best;
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (grid[i] == choice.lambda) selected_risk = choice.holdout_risks[i];
  const double gap = selected_risk - best;
  out.push_back({"holdout_selection_is_argmin", gap == 0.0, gap,
                 "selected risk minus the grid minimum"});
}

void check_rademacher(std::vector<CheckResult>& out) {
  const double a = diagnostics::rademacher_two_layer(1.0, 1.0, 100, 10, 1000);
  const double b = diagnostics::rademacher_linear(2.0, 3.0, 1.0, 4);
  const double err = std::max(std::abs(a - 2.0), std::abs(b - 2.0));
  out.push_back({"rademacher_calculators_exact", err == 0.0, err,
                 "2 B_a B_w sqrt(md/n) and sqrt(B_a^2(||W||_F^2+||b||^2)/n)"});
}

void check_csq_formulas(std::vector<CheckResult>& out) {
  double err = std::abs(csq::csq_query_lower_bound(100, 0.5, 0.01) - 12.0);
  err = std::max(err, std::abs(csq::csq_query_lower_bound(2, 1.0, 0.0) - 1.0));
  err = std::max(err, std::abs(csq::tolerance_bound(1e6, 100, 4) - std::log(1e8) / 100.0));
  err = std::max(err, std::abs(csq::tolerance_bound(1e6, 100, 0) - 1.0));

  // (u . v)^p against 2-d quadrature of E[He_p(u.x) He_p(v.x)] / p!.
  const double rho = 0.3;
  const int p = 4;
  const auto rule = hermite::gauss_hermite(12);
  double integral = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
      const double z1 = rule.nodes[i];
      const double z2 = rho * z1 + std::sqrt(1.0 - rho * rho) * rule.nodes[j];
      integral += rule.weights[i] * rule.weights[j] * hermite::he_eval(p, z1) * hermite::he_eval(p, z2);
    }
  }
  integral /= hermite::factorial(p);
  err = std::max(err, std::abs(integral - std::pow(rho, p)));
  out.push_back({"csq_bound_formulas_and_correlation", err <= 1e-6, err,
                 "hand arithmetic plus quadrature cross-check"});
}

void check_seed_determinism(std::vector<CheckResult>& out) {
  const auto f = reference_target(9);
  const auto ds1 = data::sample_dataset(f, 257, 1.0, 55);
  const auto ds2 = data::sample_dataset(f, 257, 1.0, 55);
  const double diff = (ds1.X - ds2.X).cwiseAbs().maxCoeff() + (ds1.y - ds2.y).cwiseAbs().maxCoeff();
  out.push_back({"dataset_seed_determinism", diff == 0.0, diff,
                 "same seed gives a bit-identical dataset"});
}

void check_gaussian_moment(std::vector<CheckResult>& out) {
  const int e1[] = {4};
  const int e2[] = {1, 2};
  const int e3[] = {2, 2};
  double err = std::abs(hermite::gaussian_monomial_moment(e1) - 3.0);
  err = std::max(err, std::abs(hermite::gaussian_monomial_moment(e2)));
  err = std::max(err, std::abs(hermite::gaussian_monomial_moment(e3) - 1.0));
  out.push_back({"gaussian_monomial_moments", err == 0.0, err, "double-factorial formula"});
}

void check_parseval_mc(std::vector<CheckResult>& out) {
  const auto f = reference_target(10);
  const long n = 200000;
  MatrixXd X(n, 10);
  kernels::fill_gaussian_rows(61, "x", X);
  VectorXd values;
  targets::eval_target_batch(f, X, values);
  const auto sums = kernels::chunked_accumulate<2>(n, [&](long i, std::array<double, 2>& acc) {
    const double sq = values(i) * values(i);
    acc[0] += sq;
    acc[1] += sq * sq;
  });
  const double mean = sums[0] / n;
  const double var = std::max(0.0, sums[1] / n - mean * mean);
  const double se = std::sqrt(var / n);
  const double z = std::abs(mean - 1.0) / se;
  out.push_back({"target_unit_l2_norm_mc", z <= 3.5, z, "z-score of E[f^2] against 1"});
}

void check_hessian_examples(std::vector<CheckResult>& out) {
  const auto f = reference_target(10);
  const auto summary = targets::expected_hessian(f);
  double err = std::abs(summary.kappa - 1.0);
  err = std::max(err, std::abs(static_cast<double>(summary.rank) - 1.0));
  MatrixXd expected = MatrixXd::Zero(10, 10);
  expected(0, 0) = 1.0;
  err = std::max(err, (summary.H - expected).cwiseAbs().maxCoeff());

  MatrixXd U = MatrixXd::Zero(1, 10);
  U(0, 0) = 1.0;
  const auto cubic = targets::make_target(U, {{{0.0, 0.0, 0.0, 1.0 / std::sqrt(6.0)}}});
  const auto cubic_summary = targets::expected_hessian(cubic);
  err = std::max(err, static_cast<double>(cubic_summary.rank));
  out.push_back({"expected_hessian_closed_forms", err <= 1e-12, err,
                 "rank/kappa/H for the quadratic+quartic and pure-cubic targets"});
}

void check_vk_spot(std::vector<CheckResult>& out) {
  rng::Stream stream(rng::derive_seed(71, "vk"));
  const long n = 100000;
  const double x = 0.5;
  double sum = 0.0, sumsq = 0.0;
  for (long i = 0; i < n; ++i) {
    const double a = stream.next_sign();
    const double b = stream.next_uniform_in(-1.0, 1.0);
    const double value =
        diagnostics::monomial_weight_v(2, a, b, diagnostics::VkMode::kUniform) *
        std::max(0.0, a * x + b);
    sum += value;
    sumsq += value * value;
  }
  const double mean = sum / n;
  const double se = std::sqrt(std::max(0.0, sumsq / n - mean * mean) / n);
  const double z = std::abs(mean - x * x) / se;
  out.push_back({"vk_identity_spot_check", z <= 4.0, z, "z-score of E[v_2 relu(ax+b)] against x^2"});
}

}  // namespace

std::vector<CheckResult> run_all(const FaultInjection& fault) {
  std::vector<CheckResult> results;
  check_hermite_orthogonality(results);
  check_relu_coeff_quadrature(results, fault);
  check_monomial_roundtrip(results);
  check_relu_reconstruction(results, fault);
  check_network_init(results);
  check_homogeneity(results);
  check_gn_scale_invariance(results);
  check_first_layer_finite_difference(results);
  check_gd_vs_ridge(results);
  check_ridge_monotone_path(results);
  check_holdout_argmin(results);
  check_rademacher(results);
  check_csq_formulas(results);
  check_seed_determinism(results);
  check_gaussian_moment(results);
  check_parseval_mc(results);
  check_hessian_examples(results);
  check_vk_spot(results);
  return results;
}

int print_report(const std::vector<CheckResult>& results) {
  int failures = 0;
  for (const auto& result : results) {
    std::printf("[%s] %-40s measured=%.6g  %s\n", result.pass ? "PASS" : "FAIL",
                result.name.c_str(), result.measured, result.note.c_str());
    if (!result.pass) ++failures;
  }
  std::printf("%zu checks, %d failed\n", results.size(), failures);
  return failures;
}

}  // namespace polyrep::validate
