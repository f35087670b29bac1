#include "polyrep/data.hpp"

#include <cstdio>
#include <cstring>
#include <stdexcept>

#include "polyrep/errors.hpp"
#include "polyrep/kernels.hpp"
#include "polyrep/rng.hpp"

namespace polyrep::data {

Dataset sample_dataset(const targets::TargetFunction& f, long n, double sigma,
                       std::uint64_t seed) {
  if (n < 1) throw DimensionMismatch("sample_dataset: need n >= 1");
  if (sigma < 0.0) throw DimensionMismatch("sample_dataset: negative noise level");

  Dataset ds;
  ds.sigma_noise = sigma;
  ds.seed = seed;
  ds.X.resize(n, f.d);
  kernels::fill_gaussian_rows(seed, "x", ds.X);

  targets::eval_target_batch(f, ds.X, ds.y);
  if (sigma > 0.0) {
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) {
      rng::Stream stream(rng::derive_seed(seed, "noise", static_cast<std::uint64_t>(i)));
      ds.y(i) += sigma * stream.next_sign();
    }
  }
  return ds;
}

PreprocessStats preprocess(const Dataset& ds) {
  const long n = ds.n();
  const long d = ds.d();
  PreprocessStats stats;
  stats.alpha = kernels::chunked_sum(n, [&](long i) { return ds.y(i); }) / static_cast<double>(n);
  kernels::feature_label_product(ds.X, ds.y, 1.0 / static_cast<double>(n), stats.beta);
  (void)d;
  stats.y_centered.resize(n);
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i)
    stats.y_centered(i) = ds.y(i) - stats.alpha - stats.beta.dot(ds.X.row(i));
  return stats;
}

namespace {
constexpr char kMagic[8] = {'P', 'R', 'D', 'S', '0', '1', '\n', '\0'};
}

void save_dataset(const Dataset& ds, const std::string& path) {
  std::FILE* file = std::fopen(path.c_str(), "wb");
  if (!file) throw std::runtime_error("save_dataset: cannot open " + path);
  const std::int64_t n = ds.n(), d = ds.d();
  std::fwrite(kMagic, 1, sizeof(kMagic), file);
  std::fwrite(&n, sizeof(n), 1, file);
  std::fwrite(&d, sizeof(d), 1, file);
  std::fwrite(&ds.sigma_noise, sizeof(double), 1, file);
  std::fwrite(&ds.seed, sizeof(ds.seed), 1, file);
  for (long i = 0; i < n; ++i)
    for (long j = 0; j < d; ++j) std::fwrite(&ds.X(i, j), sizeof(double), 1, file);
  std::fwrite(ds.y.data(), sizeof(double), static_cast<std::size_t>(n), file);
  std::fclose(file);
}

Dataset load_dataset(const std::string& path) {
  std::FILE* file = std::fopen(path.c_str(), "rb");
  if (!file) throw std::runtime_error("load_dataset: cannot open " + path);
  char magic[8];
  std::int64_t n = 0, d = 0;
  Dataset ds;
  bool ok = std::fread(magic, 1, sizeof(magic), file) == sizeof(magic) &&
            std::memcmp(magic, kMagic, sizeof(magic)) == 0 &&
            std::fread(&n, sizeof(n), 1, file) == 1 && std::fread(&d, sizeof(d), 1, file) == 1 &&
            std::fread(&ds.sigma_noise, sizeof(double), 1, file) == 1 &&
            std::fread(&ds.seed, sizeof(ds.seed), 1, file) == 1 && n >= 1 && d >= 1;
  if (ok) {
    ds.X.resize(n, d);
    for (long i = 0; i < n && ok; ++i)
      for (long j = 0; j < d && ok; ++j)
        ok = std::fread(&ds.X(i, j), sizeof(double), 1, file) == 1;
    ds.y.resize(n);
    ok = ok && std::fread(ds.y.data(), sizeof(double), static_cast<std::size_t>(n), file) ==
                   static_cast<std::size_t>(n);
  }
  std::fclose(file);
  if (!ok) throw std::runtime_error("load_dataset: malformed file " + path);
  return ds;
}

}  // namespace polyrep::data
