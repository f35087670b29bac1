#pragma once

// Experiment orchestration: deterministic cell fan-out over (method, n, seed),
// fixed-schema CSV emission, summary JSON, and resumable runs.

#include <optional>
#include <string>
#include <vector>

#include "polyrep/config.hpp"

namespace polyrep::harness {

// CSV schema (fixed): method,d,p,m,n,N,seed,lambda,l2_excess,l1_excess,projection_ratio,wall_time_s
struct Record {
  std::string method;
  int d = 0;
  int p = 0;
  long m = 0;
  long n = 0;
  std::optional<long> N;
  int seed = 0;
  std::optional<double> lambda;
  std::optional<double> l2_excess;
  std::optional<double> l1_excess;
  std::optional<double> projection_ratio;
  std::optional<double> wall_time_s;
  std::string error;  // summary-only; CSV rows of failed cells have empty metrics
};

std::string csv_header();
std::string csv_row(const Record& record);

std::vector<Record> run_sweep(const config::ExperimentConfig& cfg);
std::vector<Record> run_transfer(const config::ExperimentConfig& cfg);

// Writes <out stem>_residual.csv, _alignment.csv, _vk.csv; returns their paths.
std::vector<std::string> run_diagnose(const config::ExperimentConfig& cfg);

// Writes one row per adversary-game trial plus the bound columns.
std::string run_csq_report(const config::ExperimentConfig& cfg);

// Prints one line per fast invariant check; returns the number of failures.
int run_validate(const config::ExperimentConfig& cfg);

void write_records_csv(const std::string& path, const std::vector<Record>& records);
void write_summary_json(const config::ExperimentConfig& cfg, const std::vector<Record>& records,
                        const std::string& path);

// Dispatches sweep/transfer/diagnose/csq/validate per cfg.kind, writing
// cfg.out and the summary; returns a process exit code.
int run_experiment(const config::ExperimentConfig& cfg);

}  // namespace polyrep::harness
