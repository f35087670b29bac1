#include "polyrep/diagnostics.hpp"

#include <cmath>
#include <numbers>

#include "polyrep/errors.hpp"
#include "polyrep/kernels.hpp"
#include "polyrep/rng.hpp"

namespace polyrep::diagnostics {

namespace {

const double kInvSqrt2Pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);

// I_j = E[He_j(z) 1{z>=0}] and M_j = E[He_j(z) z 1{z>=0}] for z ~ N(0,1).
double indicator_moment(int j) {
  if (j == 0) return 0.5;
  return hermite::he_eval(j - 1, 0.0) * kInvSqrt2Pi;
}

double indicator_z_moment(int j) {
  const double upper = indicator_moment(j + 1);
  const double lower = j >= 1 ? static_cast<double>(j) * indicator_moment(j - 1) : 0.0;
  return upper + lower;
}

}  // namespace

PopulationGEstimate estimate_population_g(const targets::TargetFunction& f,
                                          const Eigen::VectorXd& w, long n_mc,
                                          std::uint64_t seed) {
  if (w.size() != f.d) throw DimensionMismatch("estimate_population_g: wrong dimension");
  if (std::abs(w.norm() - 1.0) > 1e-8)
    throw DimensionMismatch("estimate_population_g: w must be a unit vector");
  if (n_mc < 2) throw DimensionMismatch("estimate_population_g: need n_mc >= 2");

  const double c0 = targets::c0_coefficient(f);
  const Eigen::VectorXd c1 = targets::c1_coefficient(f);
  const long d = f.d;

  const long chunk = kernels::kReduceChunk;
  const long nchunks = (n_mc + chunk - 1) / chunk;
  Eigen::MatrixXd chunk_sums = Eigen::MatrixXd::Zero(d, nchunks);
  Eigen::MatrixXd chunk_sumsq = Eigen::MatrixXd::Zero(d, nchunks);

#pragma omp parallel for schedule(static)
  for (long c = 0; c < nchunks; ++c) {
    rng::Stream stream(rng::derive_seed(seed, "popg", static_cast<std::uint64_t>(c)));
    Eigen::VectorXd x(d);
    const long lo = c * chunk;
    const long hi = std::min(n_mc, lo + chunk);
    for (long i = lo; i < hi; ++i) {
      for (long k = 0; k < d; ++k) x(k) = stream.next_gaussian();
      if (w.dot(x) < 0.0) continue;
      const double fhat = targets::eval_target(f, x) - c0 - c1.dot(x);
      for (long k = 0; k < d; ++k) {
        const double value = fhat * x(k);
        chunk_sums(k, c) += value;
        chunk_sumsq(k, c) += value * value;
      }
    }
  }

  Eigen::VectorXd sum = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd sumsq = Eigen::VectorXd::Zero(d);
  for (long c = 0; c < nchunks; ++c) {
    sum += chunk_sums.col(c);
    sumsq += chunk_sumsq.col(c);
  }

  PopulationGEstimate estimate;
  const double inv_n = 1.0 / static_cast<double>(n_mc);
  estimate.g = sum * inv_n;
  estimate.stderr_per_coord.resize(d);
  for (long k = 0; k < d; ++k) {
    const double var = std::max(0.0, sumsq(k) * inv_n - estimate.g(k) * estimate.g(k));
    estimate.stderr_per_coord(k) = std::sqrt(var * inv_n);
  }
  return estimate;
}

Eigen::VectorXd leading_term(const Eigen::MatrixXd& H, const Eigen::VectorXd& w) {
  if (H.cols() != w.size()) throw DimensionMismatch("leading_term: dimension mismatch");
  return (H * w) * kInvSqrt2Pi;
}

InPlaneG population_g_closed_form(const hermite::HermiteSeries& centered, double rho) {
  const int p = centered.max_degree();
  const double gamma = std::sqrt(std::max(0.0, 1.0 - rho * rho));
  InPlaneG result;
  for (int k = 0; k <= p; ++k) {
    const double alpha = centered.coeffs[k];
    if (alpha == 0.0) continue;
    result.along_w += alpha * std::pow(rho, k) * indicator_z_moment(k);
    if (k >= 1)
      result.along_v += gamma * alpha * k * std::pow(rho, k - 1) * indicator_moment(k - 1);
  }
  return result;
}

std::vector<ResidualRow> residual_scaling_study(const hermite::HermiteSeries& component,
                                                const std::vector<int>& dims, long n_mc,
                                                int trials, std::uint64_t seed) {
  if (dims.size() < 2) throw DimensionMismatch("residual_scaling_study: need >= 2 dimensions");
  if (trials < 2) throw DimensionMismatch("residual_scaling_study: need >= 2 trials");
  if (n_mc < 2) throw DimensionMismatch("residual_scaling_study: need n_mc >= 2");

  hermite::HermiteSeries centered = component;
  {
    // Analytic centering: drop the C_0 and C_1 parts.
    const double norm = std::sqrt(hermite::series_l2_norm_sq(centered));
    if (norm == 0.0) throw ZeroFunction("residual_scaling_study: zero component");
    for (auto& c : centered.coeffs) c /= norm;
    if (centered.max_degree() >= 0) centered.coeffs[0] = 0.0;
    if (centered.max_degree() >= 1) centered.coeffs[1] = 0.0;
  }
  const int p = centered.max_degree();
  const double alpha2 = p >= 2 ? centered.coeffs[2] : 0.0;

  std::vector<ResidualRow> rows;
  for (std::size_t di = 0; di < dims.size(); ++di) {
    const int d = dims[di];
    if (d < 2) throw DimensionMismatch("residual_scaling_study: need d >= 2");

    std::vector<double> residuals(static_cast<std::size_t>(trials));
    std::vector<double> mc_errors(static_cast<std::size_t>(trials));

    for (int trial = 0; trial < trials; ++trial) {
      const std::uint64_t key = (static_cast<std::uint64_t>(di) << 32) |
                                static_cast<std::uint64_t>(trial);
      // Random unit w; only its overlap with u = e_1 enters the 2-d reduction.
      rng::Stream wstream(rng::derive_seed(seed, "w", key));
      double first = 0.0;
      double norm_sq = 0.0;
      for (int k = 0; k < d; ++k) {
        const double g = wstream.next_gaussian();
        if (k == 0) first = g;
        norm_sq += g * g;
      }
      const double rho = first / std::sqrt(norm_sq);
      const double gamma = std::sqrt(std::max(0.0, 1.0 - rho * rho));

      // Per-draw integrands after conditioning on (w.x, v.x): coefficients of
      // He_l(s) for the w and v components, plus the rho = 0 control variate
      // whose exact mean vanishes for a centered component.
      Eigen::VectorXd coeff_w = Eigen::VectorXd::Zero(p + 1);
      Eigen::VectorXd coeff_v = Eigen::VectorXd::Zero(p + 1);
      for (int k = 0; k <= p; ++k) {
        const double alpha = centered.coeffs[k];
        if (alpha == 0.0) continue;
        for (int l = 0; l <= k; ++l) {
          const double shared = alpha * hermite::binomial(k, l) *
                                std::pow(rho, k - l) * std::pow(gamma, l);
          coeff_w(l) += shared * indicator_z_moment(k - l);
          coeff_v(l) += shared * indicator_moment(k - l);
        }
      }
      Eigen::VectorXd cv_w = Eigen::VectorXd::Zero(p + 1);
      Eigen::VectorXd cv_v = Eigen::VectorXd::Zero(p + 1);
      for (int l = 0; l <= p; ++l) {
        cv_w(l) = centered.coeffs[l] * indicator_z_moment(0);
        cv_v(l) = centered.coeffs[l] * indicator_moment(0);
      }

      const long chunk = kernels::kReduceChunk;
      const long nchunks = (n_mc + chunk - 1) / chunk;
      Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(4, nchunks);  // dA, dB, dA^2, dB^2
      const std::uint64_t trial_seed = rng::derive_seed(seed, "s", key);
#pragma omp parallel for schedule(static)
      for (long c = 0; c < nchunks; ++c) {
        rng::Stream stream(rng::derive_seed(trial_seed, "chunk", static_cast<std::uint64_t>(c)));
        std::vector<double> he(static_cast<std::size_t>(p) + 1);
        const long lo = c * chunk;
        const long hi = std::min(n_mc, lo + chunk);
        for (long i = lo; i < hi; ++i) {
          const double s = stream.next_gaussian();
          hermite::he_eval_all(p, s, he);
          double phi_w = 0.0, phi_v = 0.0, psi_w = 0.0, psi_v = 0.0;
          for (int l = 0; l <= p; ++l) {
            phi_w += coeff_w(l) * he[static_cast<std::size_t>(l)];
            phi_v += coeff_v(l) * he[static_cast<std::size_t>(l)];
            psi_w += cv_w(l) * he[static_cast<std::size_t>(l)];
            psi_v += cv_v(l) * he[static_cast<std::size_t>(l)];
          }
          const double delta_w = phi_w - psi_w;
          const double delta_v = s * (phi_v - psi_v);
          sums(0, c) += delta_w;
          sums(1, c) += delta_v;
          sums(2, c) += delta_w * delta_w;
          sums(3, c) += delta_v * delta_v;
        }
      }
      Eigen::Vector4d total = Eigen::Vector4d::Zero();
      for (long c = 0; c < nchunks; ++c) total += sums.col(c);

      const double inv_n = 1.0 / static_cast<double>(n_mc);
      const double est_w = total(0) * inv_n;
      const double est_v = total(1) * inv_n;
      const double var_w = std::max(0.0, total(2) * inv_n - est_w * est_w);
      const double var_v = std::max(0.0, total(3) * inv_n - est_v * est_v);

      const double lead_w = 2.0 * alpha2 * rho * rho * kInvSqrt2Pi;
      const double lead_v = 2.0 * alpha2 * rho * gamma * kInvSqrt2Pi;
      residuals[static_cast<std::size_t>(trial)] =
          std::hypot(est_w - lead_w, est_v - lead_v);
      mc_errors[static_cast<std::size_t>(trial)] = std::sqrt((var_w + var_v) * inv_n);
    }

    ResidualRow row;
    row.d = d;
    row.ref_inv_d = 1.0 / static_cast<double>(d);
    double mean = 0.0;
    for (double r : residuals) mean += r;
    mean /= trials;
    double var = 0.0;
    for (double r : residuals) var += (r - mean) * (r - mean);
    var /= std::max(1, trials - 1);
    row.mean_residual = mean;
    row.stderr_mean = std::sqrt(var / trials);
    double mc = 0.0;
    for (double e : mc_errors) mc += e;
    row.mc_stderr = mc / trials;
    if (row.mc_stderr >= 0.5 * row.mean_residual)
      throw InsufficientPrecision("residual_scaling_study: Monte Carlo error " +
                                  std::to_string(row.mc_stderr) + " exceeds half the residual " +
                                  std::to_string(row.mean_residual) + " at d=" + std::to_string(d));
    rows.push_back(row);
  }
  return rows;
}

AlignmentReport subspace_alignment(const Eigen::MatrixXd& W1, const targets::TargetFunction& f) {
  if (W1.cols() != f.d) throw DimensionMismatch("subspace_alignment: dimension mismatch");
  const double total = W1.squaredNorm();
  if (total == 0.0) throw ZeroFunction("subspace_alignment: zero weight matrix");

  AlignmentReport report;
  const Eigen::MatrixXd latent = W1 * f.U.transpose();  // m x r
  report.projection_ratio = latent.squaredNorm() / total;

  const long m = W1.rows();
  report.per_neuron_cos.resize(m);
  for (long j = 0; j < m; ++j) {
    const double row_norm = W1.row(j).norm();
    report.per_neuron_cos(j) = row_norm == 0.0 ? 0.0 : latent.row(j).norm() / row_norm;
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(latent);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double cutoff = 1e-8 * sv.maxCoeff();
  report.latent_rank = 0;
  for (long i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff && sv(i) > 0.0) ++report.latent_rank;
  return report;
}

double monomial_weight_v(int k, double a, double b, VkMode mode) {
  if (k < 0) throw DomainError("monomial_weight_v: negative degree");
  if (a != 1.0 && a != -1.0) throw DomainError("monomial_weight_v: a must be +-1");
  if (mode == VkMode::kUniform) {
    if (std::abs(b) > 1.0) throw DomainError("monomial_weight_v: uniform mode needs |b| <= 1");
    if (k == 0) return 6.0 * b;
    if (k == 1) return 2.0 * a;
    const double second_deriv = k * (k - 1) * std::pow(b, k - 2);
    const double fp1 = k;   // f'(1) for f(x) = x^k
    const double f1 = 1.0;  // f(1)
    return 2.0 * (1.0 - a) * second_deriv - (fp1 - f1) * (6.0 * b) + fp1 * (2.0 * a);
  }
  if (std::abs(b) > 1.0) return 0.0;
  const double density = std::exp(-0.5 * b * b) * kInvSqrt2Pi;
  return monomial_weight_v(k, a, b, VkMode::kUniform) / (2.0 * density);
}

double rademacher_two_layer(double B_a, double B_w, long m, long d, long n) {
  if (B_a < 0.0 || B_w < 0.0 || m < 1 || d < 1 || n < 1)
    throw DomainError("rademacher_two_layer: invalid inputs");
  return 2.0 * B_a * B_w * std::sqrt(static_cast<double>(m) * static_cast<double>(d) /
                                     static_cast<double>(n));
}

double rademacher_linear(double B_a, double W_frob_sq, double b_norm_sq, long n) {
  if (B_a < 0.0 || W_frob_sq < 0.0 || b_norm_sq < 0.0 || n < 1)
    throw DomainError("rademacher_linear: invalid inputs");
  return std::sqrt(B_a * B_a * (W_frob_sq + b_norm_sq) / static_cast<double>(n));
}

}  // namespace polyrep::diagnostics
