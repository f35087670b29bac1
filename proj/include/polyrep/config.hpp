#pragma once

// Declarative experiment configuration: a sectioned key/value text file with
// defaults matching the reference experiments (d=10, p=4, m=100, sigma=1,
// 10 seeds, lambda tuned on a holdout set). CLI flags override file values.

#include <cstdint>
#include <string>
#include <vector>

#include "polyrep/targets.hpp"
#include "polyrep/trainer.hpp"

namespace polyrep::config {

enum class Kind { kSweep, kTransfer, kDiagnose, kCsq, kValidate };

struct TargetSpec {
  int d = 10;
  // Direction tokens: "e<k>" basis vectors, or explicit semicolon-separated
  // coordinate lists.
  std::vector<std::string> directions = {"e1"};
  // One Hermite coefficient list per direction.
  std::vector<std::vector<double>> components = {
      {0.0, 0.0, 0.5, 0.0, 0.14433756729740643}};  // He_2/2 + He_4/(4 sqrt 3)
  int p_max = hermite::kDefaultMaxDegree;

  targets::TargetFunction build() const;
};

struct ExperimentConfig {
  Kind kind = Kind::kSweep;
  std::string out = "results.csv";
  std::uint64_t master_seed = 1;
  std::string profile = "full";  // full | fast
  int workers = 0;               // 0 = library default
  bool resume = false;

  TargetSpec target;
  double sigma = 1.0;
  long m = 100;
  trainer::TrainConfig train;

  // sweep
  std::vector<double> exponents;  // log_d(n); default 0, 0.25, ..., 4
  int seeds = 10;
  std::vector<std::string> methods = {"algorithm1", "rf", "ntk"};
  long n_test = 100000;

  // transfer
  std::vector<double> pretrain_exponents = {0.0, 1.0, 2.0, 3.0};
  std::vector<double> target_exponents = {0.0, 1.0, 2.0, 3.0};
  std::vector<std::vector<double>> target_components = {
      {0.0, 0.0, 0.0, 0.4082482904638631}};  // He_3 / sqrt(6)

  // diagnose
  std::vector<int> diag_dims = {50, 100, 200};
  long n_mc = 1000000;
  int trials = 20;
  std::vector<long> alignment_n = {1000, 100000};
  int alignment_seeds = 10;
  long vk_draws = 1000000;

  // csq
  int csq_d = 200;
  int csq_M = 200;
  double csq_epsilon = 0.35;
  int csq_p = 4;
  double csq_tau = 0.5;
  int csq_max_restarts = 50;
  long csq_queries = -1;  // -1 = floor(M (tau^2 - eps_cert^p) / 2) - 1
  int csq_trials = 20;

  targets::TargetFunction build_target() const { return target.build(); }
  targets::TargetFunction build_transfer_target() const;
};

ExperimentConfig parse_file(const std::string& path);
ExperimentConfig parse_string(const std::string& text);

// fast: test sets and Monte Carlo sizes shrink to 1e4, seeds to 3.
void apply_profile(ExperimentConfig& cfg);

}  // namespace polyrep::config
