#include "polyrep/trainer.hpp"

#include <cmath>

#include "polyrep/errors.hpp"
#include "polyrep/kernels.hpp"
#include "polyrep/rng.hpp"

namespace polyrep::trainer {

namespace {

constexpr std::uint64_t kProbeSeed = 0x50524F4245ULL;

Eigen::VectorXd solve_spd(const Eigen::MatrixXd& A, const Eigen::VectorXd& rhs) {
  return Eigen::LLT<Eigen::MatrixXd>(A).solve(rhs);
}

// Minimum-norm solution of A x = rhs for symmetric PSD A.
Eigen::VectorXd solve_pinv(const Eigen::MatrixXd& A, const Eigen::VectorXd& rhs) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(A);
  const Eigen::VectorXd& eigs = solver.eigenvalues();
  const double cutoff = 1e-12 * std::max(eigs.cwiseAbs().maxCoeff(), 1e-300);
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(eigs.size());
  for (long i = 0; i < eigs.size(); ++i)
    if (eigs(i) > cutoff) inv(i) = 1.0 / eigs(i);
  return solver.eigenvectors() * inv.asDiagonal() * solver.eigenvectors().transpose() * rhs;
}

}  // namespace

std::vector<double> default_lambda_grid() {
  // 13 log-spaced points over [1e-6, 1e2], plus 0.
  std::vector<double> grid = {0.0};
  for (int i = 0; i < 13; ++i) grid.push_back(std::pow(10.0, -6.0 + 8.0 * i / 12.0));
  return grid;
}

double default_eta1(long n, long m, long d) {
  const double log_term =
      std::max(1.0, std::log(static_cast<double>(n) * static_cast<double>(m) *
                             static_cast<double>(d)));
  return std::sqrt(static_cast<double>(d)) / std::pow(log_term, 1.5);
}

long default_holdout_n(long n, long cap) { return std::min(cap, 10 * n); }

Eigen::VectorXd g_n(const Eigen::VectorXd& w, const data::Dataset& ds,
                    const data::PreprocessStats& stats) {
  if (w.size() != ds.d()) throw DimensionMismatch("g_n: wrong direction dimension");
  if (w.isZero(0.0)) throw DimensionMismatch("g_n: zero direction");
  const long n = ds.n();
  Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(ds.d());
  for (long i = 0; i < n; ++i) {
    if (w.dot(ds.X.row(i)) >= 0.0) acc += stats.y_centered(i) * ds.X.row(i);
  }
  return (acc / static_cast<double>(n)).transpose();
}

Eigen::MatrixXd first_layer_step(const network::NetworkParams& params,
                                 const data::Dataset& ds,
                                 const data::PreprocessStats& stats, double eta1) {
  if (params.dim() != ds.d()) throw DimensionMismatch("first_layer_step: dimension mismatch");
  // The closed form below is only the gradient step when the network output is
  // identically zero; probe a few random points.
  rng::Stream probe(rng::derive_seed(kProbeSeed, "probe"));
  for (int trial = 0; trial < 8; ++trial) {
    Eigen::VectorXd x(params.dim());
    for (long k = 0; k < params.dim(); ++k) x(k) = probe.next_gaussian();
    if (std::abs(network::forward(params, x)) > 1e-9)
      throw NotAtInit("first_layer_step: network output is not identically zero");
  }

  Eigen::MatrixXd signal;
  kernels::gradient_signal(ds.X, stats.y_centered, params.W, signal);
  const long m = params.width();
  Eigen::MatrixXd W1(m, params.dim());
#pragma omp parallel for schedule(static)
  for (long j = 0; j < m; ++j) W1.row(j) = (2.0 * eta1 * params.a(j)) * signal.row(j);
  return W1;
}

Eigen::VectorXd reinit_biases(const network::NetworkParams& params, std::uint64_t seed) {
  rng::Stream stream(rng::derive_seed(seed, "bias"));
  Eigen::VectorXd b(params.width());
  for (long j = 0; j < params.width(); ++j) b(j) = stream.next_gaussian();
  return b;
}

Eigen::VectorXd ridge_closed_form(const Eigen::MatrixXd& phi, const Eigen::VectorXd& yhat,
                                  double lambda) {
  if (phi.rows() != yhat.size()) throw DimensionMismatch("ridge_closed_form: row mismatch");
  if (lambda < 0.0) throw StepSizeTooLarge("ridge_closed_form: negative lambda");
  const double inv_n = 1.0 / static_cast<double>(phi.rows());
  Eigen::MatrixXd G;
  kernels::gram(phi, inv_n, G);
  Eigen::VectorXd c;
  kernels::feature_label_product(phi, yhat, inv_n, c);
  if (lambda == 0.0) return solve_pinv(G, c);
  G.diagonal().array() += lambda;
  return solve_spd(G, c);
}

Eigen::VectorXd train_head_gd(const Eigen::MatrixXd& phi, const Eigen::VectorXd& yhat,
                              const Eigen::VectorXd& a0, double eta, double lambda, long T,
                              double tol) {
  if (phi.rows() != yhat.size()) throw DimensionMismatch("train_head_gd: row mismatch");
  const double inv_n = 1.0 / static_cast<double>(phi.rows());
  Eigen::MatrixXd G;
  kernels::gram(phi, inv_n, G);
  Eigen::VectorXd c;
  kernels::feature_label_product(phi, yhat, inv_n, c);

  const double curvature = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(G)
                               .eigenvalues()
                               .maxCoeff();
  const double lipschitz = 2.0 * curvature + 2.0 * lambda;
  if (eta <= 0.0) eta = 1.0 / (curvature + lambda + 1e-12);
  if (eta * lipschitz >= 2.0)
    throw StepSizeTooLarge("train_head_gd: eta * (2 lmax(G) + 2 lambda) >= 2");

  Eigen::VectorXd a = a0;
  for (long t = 0; t < T; ++t) {
    const Eigen::VectorXd grad = 2.0 * (G * a - c) + 2.0 * lambda * a;
    const Eigen::VectorXd step = eta * grad;
    a -= step;
    if (!a.allFinite()) throw NonFinite("train_head_gd: head diverged");
    if (step.norm() < tol) break;
  }
  return a;
}

Eigen::VectorXd train_head_gd(const network::NetworkParams& params, const data::Dataset& ds,
                              const data::PreprocessStats& stats, double eta, double lambda,
                              long T, double tol) {
  Eigen::MatrixXd phi;
  network::head_features(params, ds.X, phi);
  return train_head_gd(phi, stats.y_centered, params.a, eta, lambda, T, tol);
}

LambdaChoice tune_lambda_features(const Eigen::MatrixXd& phi_train,
                                  const Eigen::VectorXd& yhat,
                                  const Eigen::MatrixXd& phi_holdout,
                                  const Eigen::VectorXd& holdout_offset,
                                  const Eigen::VectorXd& holdout_y,
                                  const std::vector<double>& grid, const TrainConfig& cfg,
                                  const Eigen::VectorXd& a0) {
  if (grid.empty()) throw ConfigError("tune_lambda: empty lambda grid");
  if (!std::is_sorted(grid.begin(), grid.end()))
    throw ConfigError("tune_lambda: lambda grid must be ascending");
  const long n = phi_train.rows();
  const long nfeat = phi_train.cols();
  const long nl = static_cast<long>(grid.size());
  const double inv_n = 1.0 / static_cast<double>(n);

  Eigen::MatrixXd heads(nfeat, nl);
  if (cfg.head_gd) {
    const Eigen::VectorXd start = a0.size() == nfeat ? a0 : Eigen::VectorXd::Zero(nfeat);
    for (long l = 0; l < nl; ++l)
      heads.col(l) = train_head_gd(phi_train, yhat, start, cfg.eta,
                                   grid[static_cast<std::size_t>(l)], cfg.T, cfg.tol);
  } else if (nfeat <= n) {
    Eigen::MatrixXd G;
    kernels::gram(phi_train, inv_n, G);
    Eigen::VectorXd c;
    kernels::feature_label_product(phi_train, yhat, inv_n, c);
#pragma omp parallel for schedule(dynamic)
    for (long l = 0; l < nl; ++l) {
      const double lambda = grid[static_cast<std::size_t>(l)];
      if (lambda == 0.0) {
        heads.col(l) = solve_pinv(G, c);
      } else {
        Eigen::MatrixXd shifted = G;
        shifted.diagonal().array() += lambda;
        heads.col(l) = solve_spd(shifted, c);
      }
    }
  } else {
    // Dual path: (phi phi^T + n lambda I) alpha = yhat, a = phi^T alpha.
    Eigen::MatrixXd phi_t = phi_train.transpose();
    Eigen::MatrixXd K;
    kernels::gram(phi_t, 1.0, K);
#pragma omp parallel for schedule(dynamic)
    for (long l = 0; l < nl; ++l) {
      const double lambda = grid[static_cast<std::size_t>(l)];
      Eigen::VectorXd dual;
      if (lambda == 0.0) {
        dual = solve_pinv(K, yhat);
      } else {
        Eigen::MatrixXd shifted = K;
        shifted.diagonal().array() += lambda * static_cast<double>(n);
        dual = solve_spd(shifted, yhat);
      }
      heads.col(l) = phi_train.transpose() * dual;
    }
  }

  // Holdout risk of the full predictor for every candidate at once.
  const long nh = phi_holdout.rows();
  std::vector<double> risks(static_cast<std::size_t>(nl));
  Eigen::MatrixXd preds = phi_holdout * heads;  // nh x nl
  for (long l = 0; l < nl; ++l) {
    const double sum = kernels::chunked_sum(nh, [&](long i) {
      const double err = preds(i, l) + holdout_offset(i) - holdout_y(i);
      return err * err;
    });
    risks[static_cast<std::size_t>(l)] = sum / static_cast<double>(nh);
  }

  LambdaChoice choice;
  long best = 0;
  for (long l = 1; l < nl; ++l) {
    // <= prefers the later (larger) lambda on ties; the grid is ascending.
    if (risks[static_cast<std::size_t>(l)] <= risks[static_cast<std::size_t>(best)]) best = l;
  }
  choice.lambda = grid[static_cast<std::size_t>(best)];
  choice.head = heads.col(best);
  choice.holdout_risks = std::move(risks);
  return choice;
}

LambdaChoice tune_lambda(const network::NetworkParams& params, const data::Dataset& train_ds,
                         const data::PreprocessStats& stats, const data::Dataset& holdout_ds,
                         const std::vector<double>& grid, const TrainConfig& cfg) {
  Eigen::MatrixXd phi_train, phi_holdout;
  network::head_features(params, train_ds.X, phi_train);
  network::head_features(params, holdout_ds.X, phi_holdout);
  Eigen::VectorXd offset(holdout_ds.n());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < holdout_ds.n(); ++i)
    offset(i) = stats.alpha + stats.beta.dot(holdout_ds.X.row(i));
  return tune_lambda_features(phi_train, stats.y_centered, phi_holdout, offset, holdout_ds.y,
                              grid, cfg, params.a);
}

network::NetworkPredictor run_algorithm1(const targets::TargetFunction& f, long n, long m,
                                         double sigma, const TrainConfig& cfg,
                                         std::uint64_t seed, AlgorithmTrace* trace) {
  const data::Dataset ds = data::sample_dataset(f, n, sigma, rng::derive_seed(seed, "train"));
  const long holdout_n =
      cfg.holdout_n > 0 ? cfg.holdout_n : default_holdout_n(n, cfg.holdout_cap);
  const data::Dataset holdout =
      data::sample_dataset(f, holdout_n, sigma, rng::derive_seed(seed, "holdout"));

  network::NetworkParams params = network::init_symmetric(m, f.d, rng::derive_seed(seed, "net"));
  const data::PreprocessStats stats = data::preprocess(ds);
  const double eta1 = cfg.eta1 > 0.0 ? cfg.eta1 : default_eta1(n, m, f.d);
  params.W = first_layer_step(params, ds, stats, eta1);
  params.b = reinit_biases(params, rng::derive_seed(seed, "net"));

  const data::Dataset* head_ds = &ds;
  data::Dataset resampled;
  data::PreprocessStats head_stats = stats;
  if (cfg.resample_stage2) {
    resampled = data::sample_dataset(f, n, sigma, rng::derive_seed(seed, "stage2"));
    head_stats = data::preprocess(resampled);
    head_ds = &resampled;
  }

  const std::vector<double> grid = cfg.lambda_grid.empty() ? default_lambda_grid() : cfg.lambda_grid;
  const LambdaChoice choice = tune_lambda(params, *head_ds, head_stats, holdout, grid, cfg);

  if (trace) {
    trace->W1 = params.W;
    trace->tuned_lambda = choice.lambda;
    trace->eta1 = eta1;
    trace->holdout_risks = choice.holdout_risks;
  }

  network::NetworkPredictor predictor;
  predictor.params = std::move(params);
  predictor.params.a = choice.head;
  predictor.alpha = head_stats.alpha;
  predictor.beta = head_stats.beta;
  return predictor;
}

network::NetworkPredictor retrain_head_transfer(const network::NetworkPredictor& pretrained,
                                                const data::Dataset& target_ds,
                                                const data::Dataset& target_holdout,
                                                const TrainConfig& cfg, double* tuned_lambda) {
  if (pretrained.params.dim() != target_ds.d())
    throw DimensionMismatch("retrain_head_transfer: pretrained and target dimensions differ");
  const data::PreprocessStats stats = data::preprocess(target_ds);
  const std::vector<double> grid = cfg.lambda_grid.empty() ? default_lambda_grid() : cfg.lambda_grid;
  const LambdaChoice choice =
      tune_lambda(pretrained.params, target_ds, stats, target_holdout, grid, cfg);
  if (tuned_lambda) *tuned_lambda = choice.lambda;

  network::NetworkPredictor predictor;
  predictor.params = pretrained.params;
  predictor.params.a = choice.head;
  predictor.alpha = stats.alpha;
  predictor.beta = stats.beta;
  return predictor;
}

}  // namespace polyrep::trainer
