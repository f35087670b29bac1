#include "polyrep/baselines.hpp"

#include <cmath>

#include "polyrep/errors.hpp"
#include "polyrep/kernels.hpp"
#include "polyrep/rng.hpp"

namespace polyrep::baselines {

double predict(const NtkPredictor& predictor, const Eigen::VectorXd& x) {
  const auto& params = predictor.params;
  if (x.size() != params.dim()) throw DimensionMismatch("predict: wrong input dimension");
  const long m = params.width();
  const long d = params.dim();
  double acc = predictor.alpha + predictor.beta.dot(x);
  for (long j = 0; j < m; ++j) {
    const double z = params.W.row(j).dot(x) + params.b(j);
    const double active = z >= 0.0 ? 1.0 : 0.0;
    acc += predictor.head(j) * (z > 0.0 ? z : 0.0);
    const double aj_active = params.a(j) * active;
    if (active != 0.0) {
      double grad_part = 0.0;
      for (long k = 0; k < d; ++k) grad_part += predictor.head(m + j * d + k) * x(k);
      acc += aj_active * grad_part + aj_active * predictor.head(m + m * d + j);
    }
  }
  return acc;
}

void predict_batch(const NtkPredictor& predictor, const Eigen::MatrixXd& X,
                   Eigen::VectorXd& out) {
  const long n = X.rows();
  out.resize(n);
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) out(i) = predict(predictor, Eigen::VectorXd(X.row(i).transpose()));
}

double predict(const Predictor& predictor, const Eigen::VectorXd& x) {
  return std::visit([&](const auto& p) { return predict(p, x); }, predictor);
}

void predict_batch(const Predictor& predictor, const Eigen::MatrixXd& X, Eigen::VectorXd& out) {
  std::visit([&](const auto& p) { predict_batch(p, X, out); }, predictor);
}

network::NetworkPredictor random_features_fit(const targets::TargetFunction& f, long n, long m,
                                              double sigma, const trainer::TrainConfig& cfg,
                                              std::uint64_t seed, double* tuned_lambda) {
  const data::Dataset ds = data::sample_dataset(f, n, sigma, rng::derive_seed(seed, "train"));
  const long holdout_n =
      cfg.holdout_n > 0 ? cfg.holdout_n : trainer::default_holdout_n(n, cfg.holdout_cap);
  const data::Dataset holdout =
      data::sample_dataset(f, holdout_n, sigma, rng::derive_seed(seed, "holdout"));

  network::NetworkParams params = network::init_symmetric(m, f.d, rng::derive_seed(seed, "net"));
  params.b = trainer::reinit_biases(params, rng::derive_seed(seed, "net"));
  const data::PreprocessStats stats = data::preprocess(ds);

  const std::vector<double> grid =
      cfg.lambda_grid.empty() ? trainer::default_lambda_grid() : cfg.lambda_grid;
  const trainer::LambdaChoice choice = trainer::tune_lambda(params, ds, stats, holdout, grid, cfg);
  if (tuned_lambda) *tuned_lambda = choice.lambda;

  network::NetworkPredictor predictor;
  predictor.params = std::move(params);
  predictor.params.a = choice.head;
  predictor.alpha = stats.alpha;
  predictor.beta = stats.beta;
  return predictor;
}

NtkPredictor ntk_linearized_fit(const targets::TargetFunction& f, long n, long m, double sigma,
                                const trainer::TrainConfig& cfg, std::uint64_t seed,
                                double* tuned_lambda) {
  const data::Dataset ds = data::sample_dataset(f, n, sigma, rng::derive_seed(seed, "train"));
  const long holdout_n =
      cfg.holdout_n > 0 ? cfg.holdout_n : trainer::default_holdout_n(n, cfg.holdout_cap);
  const data::Dataset holdout =
      data::sample_dataset(f, holdout_n, sigma, rng::derive_seed(seed, "holdout"));

  network::NetworkParams params = network::init_symmetric(m, f.d, rng::derive_seed(seed, "net"));
  params.b = trainer::reinit_biases(params, rng::derive_seed(seed, "net"));
  const data::PreprocessStats stats = data::preprocess(ds);

  Eigen::MatrixXd phi_train, phi_holdout;
  kernels::ntk_features(ds.X, params.W, params.b, params.a, phi_train);
  kernels::ntk_features(holdout.X, params.W, params.b, params.a, phi_holdout);
  Eigen::VectorXd offset(holdout.n());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < holdout.n(); ++i)
    offset(i) = stats.alpha + stats.beta.dot(holdout.X.row(i));

  const std::vector<double> grid =
      cfg.lambda_grid.empty() ? trainer::default_lambda_grid() : cfg.lambda_grid;
  const trainer::LambdaChoice choice = trainer::tune_lambda_features(
      phi_train, stats.y_centered, phi_holdout, offset, holdout.y, grid, cfg);
  if (tuned_lambda) *tuned_lambda = choice.lambda;

  NtkPredictor predictor;
  predictor.params = std::move(params);
  predictor.head = choice.head;
  predictor.alpha = stats.alpha;
  predictor.beta = stats.beta;
  return predictor;
}

RiskReport evaluate(const Predictor& predictor, const targets::TargetFunction& f, long n_test,
                    double sigma, std::uint64_t seed) {
  if (n_test < 1) throw DimensionMismatch("evaluate: need n_test >= 1");
  const data::Dataset test = data::sample_dataset(f, n_test, sigma, rng::derive_seed(seed, "test"));
  Eigen::VectorXd truth;
  targets::eval_target_batch(f, test.X, truth);
  Eigen::VectorXd preds;
  predict_batch(predictor, test.X, preds);

  const auto sums = kernels::chunked_accumulate<3>(n_test, [&](long i, std::array<double, 3>& acc) {
    const double err = preds(i) - truth(i);
    const double sq = err * err;
    acc[0] += sq;
    acc[1] += sq * sq;
    acc[2] += std::abs(preds(i) - test.y(i));
  });

  RiskReport report;
  report.n_test = n_test;
  const double inv_n = 1.0 / static_cast<double>(n_test);
  report.l2_excess = sums[0] * inv_n;
  const double var_sq = std::max(0.0, sums[1] * inv_n - report.l2_excess * report.l2_excess);
  report.stderr_l2 = std::sqrt(var_sq * inv_n);
  report.l1_excess = sums[2] * inv_n - sigma;
  return report;
}

Eigen::VectorXd ntk_gram_predict(const Eigen::MatrixXd& phi_train, const Eigen::VectorXd& yhat,
                                 const Eigen::MatrixXd& phi_test, double lambda) {
  const long n = phi_train.rows();
  Eigen::MatrixXd phi_t = phi_train.transpose();
  Eigen::MatrixXd K;
  kernels::gram(phi_t, 1.0, K);
  K.diagonal().array() += lambda * static_cast<double>(n);
  const Eigen::VectorXd dual = Eigen::LLT<Eigen::MatrixXd>(K).solve(yhat);
  return phi_test * (phi_train.transpose() * dual);
}

}  // namespace polyrep::baselines
