// Times the OpenMP kernels against their serial references and reports the
// speedup. Build target only; not part of the test suite.

#include <omp.h>

#include <cstdio>
#include <functional>

#include "polyrep/kernels.hpp"
#include "polyrep/rng.hpp"

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

double time_once(const std::function<void()>& fn) {
  const double t0 = omp_get_wtime();
  fn();
  return omp_get_wtime() - t0;
}

double best_of(int reps, const std::function<void()>& fn) {
  double best = time_once(fn);
  for (int i = 1; i < reps; ++i) best = std::min(best, time_once(fn));
  return best;
}

void report(const char* name, double serial, double parallel, double max_diff) {
  std::printf("%-24s serial %8.3f ms   omp %8.3f ms   speedup %5.2fx   max|diff| %.3g\n", name,
              serial * 1e3, parallel * 1e3, serial / parallel, max_diff);
}

}  // namespace

int main() {
  const long n = 20000, d = 10, m = 256;
  std::printf("threads: %d, n=%ld d=%ld m=%ld\n", omp_get_max_threads(), n, d, m);

  MatrixXd X(n, d);
  polyrep::kernels::fill_gaussian_rows(1, "x", X);
  MatrixXd W(m, d);
  polyrep::kernels::fill_gaussian_rows(2, "w", W);
  VectorXd b(m), a(m), y(n);
  polyrep::rng::Stream stream(3);
  for (long j = 0; j < m; ++j) {
    b(j) = stream.next_gaussian();
    a(j) = stream.next_sign();
  }
  for (long i = 0; i < n; ++i) y(i) = stream.next_gaussian();

  {
    MatrixXd phi_serial, phi_omp;
    const double ts = best_of(3, [&] { polyrep::kernels::relu_features_serial(X, W, b, phi_serial); });
    const double tp = best_of(3, [&] { polyrep::kernels::relu_features(X, W, b, phi_omp); });
    report("relu_features", ts, tp, (phi_serial - phi_omp).cwiseAbs().maxCoeff());

    MatrixXd G_serial, G_omp;
    const double gs = best_of(3, [&] { polyrep::kernels::gram_serial(phi_serial, 1.0 / n, G_serial); });
    const double gp = best_of(3, [&] { polyrep::kernels::gram(phi_omp, 1.0 / n, G_omp); });
    report("gram", gs, gp, (G_serial - G_omp).cwiseAbs().maxCoeff());

    VectorXd c_serial, c_omp;
    const double cs =
        best_of(3, [&] { polyrep::kernels::feature_label_product_serial(phi_serial, y, 1.0 / n, c_serial); });
    const double cp =
        best_of(3, [&] { polyrep::kernels::feature_label_product(phi_omp, y, 1.0 / n, c_omp); });
    report("feature_label_product", cs, cp, (c_serial - c_omp).cwiseAbs().maxCoeff());
  }

  {
    MatrixXd G_serial, G_omp;
    const double ts =
        best_of(3, [&] { polyrep::kernels::gradient_signal_serial(X, y, W, G_serial); });
    const double tp = best_of(3, [&] { polyrep::kernels::gradient_signal(X, y, W, G_omp); });
    report("gradient_signal", ts, tp, (G_serial - G_omp).cwiseAbs().maxCoeff());
  }

  {
    MatrixXd phi_serial, phi_omp;
    const double ts =
        best_of(3, [&] { polyrep::kernels::ntk_features_serial(X, W, b, a, phi_serial); });
    const double tp = best_of(3, [&] { polyrep::kernels::ntk_features(X, W, b, a, phi_omp); });
    report("ntk_features", ts, tp, (phi_serial - phi_omp).cwiseAbs().maxCoeff());
  }

  {
    MatrixXd A(n, d), B(n, d);
    const double ts = best_of(3, [&] { polyrep::kernels::fill_gaussian_rows_serial(7, "g", A); });
    const double tp = best_of(3, [&] { polyrep::kernels::fill_gaussian_rows(7, "g", B); });
    report("fill_gaussian_rows", ts, tp, (A - B).cwiseAbs().maxCoeff());
  }
  return 0;
}
