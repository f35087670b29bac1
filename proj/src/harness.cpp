#include "polyrep/harness.hpp"

#include <omp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "polyrep/baselines.hpp"
#include "polyrep/csq.hpp"
#include "polyrep/diagnostics.hpp"
#include "polyrep/errors.hpp"
#include "polyrep/kernels.hpp"
#include "polyrep/rng.hpp"
#include "polyrep/validate.hpp"
#include "polyrep/version.hpp"

namespace polyrep::harness {

namespace {

std::string fmt(double v) {
  char buf[32];
  const auto result = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, result.ptr);
}


std::string opt_fmt(const std::optional<double>& v) { return v ? fmt(*v) : ""; }

long n_from_exponent(int d, double exponent) {
  return std::max<long>(1, std::llround(std::pow(static_cast<double>(d), exponent)));
}

std::vector<long> unique_grid(int d, const std::vector<double>& exponents) {
  std::vector<long> grid;
  std::set<long> seen;
  for (double e : exponents) {
    const long n = n_from_exponent(d, e);
    if (seen.insert(n).second) grid.push_back(n);
  }
  return grid;
}

void ensure_parent_dir(const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
}

// Runs cells on a small worker pool. Cell bodies must write only to their own
// slot, so the output is independent of scheduling.
template <class F>
void dispatch_cells(int workers, long ncells, F&& run_cell) {
  const int nthreads = workers > 0 ? workers : omp_get_max_threads();
  omp_set_max_active_levels(1);
  if (nthreads <= 1) {
    for (long i = 0; i < ncells; ++i) run_cell(i);
    return;
  }
#pragma omp parallel for num_threads(nthreads) schedule(dynamic, 1)
  for (long i = 0; i < ncells; ++i) run_cell(i);
}

std::string resume_key(const std::string& method, long n, const std::optional<long>& N, int seed) {
  std::ostringstream key;
  key << method << '|' << n << '|' << (N ? std::to_string(*N) : "") << '|' << seed;
  return key.str();
}

// Maps (method, n, N, seed) to the raw CSV line of a previously completed run.
std::map<std::string, std::string> load_resume_lines(const std::string& path) {
  std::map<std::string, std::string> done;
  std::ifstream in(path);
  if (!in) return done;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (first) {
      first = false;
      continue;
    }
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() < 12) continue;
    const bool has_metrics = !fields[8].empty();
    if (!has_metrics) continue;  // recompute failed cells
    done[fields[0] + '|' + fields[4] + '|' + fields[5] + '|' + fields[6]] = line;
  }
  return done;
}

struct SweepCell {
  std::string method;
  long n = 0;
  int seed = 0;
};

trainer::TrainConfig cell_train_config(const config::ExperimentConfig& cfg) {
  return cfg.train;
}

}  // namespace

std::string csv_header() {
  return "method,d,p,m,n,N,seed,lambda,l2_excess,l1_excess,projection_ratio,wall_time_s";
}

std::string csv_row(const Record& r) {
  std::ostringstream out;
  out << r.method << ',' << r.d << ',' << r.p << ',' << r.m << ',' << r.n << ','
      << (r.N ? std::to_string(*r.N) : "") << ',' << r.seed << ',' << opt_fmt(r.lambda) << ','
      << opt_fmt(r.l2_excess) << ',' << opt_fmt(r.l1_excess) << ','
      << opt_fmt(r.projection_ratio) << ',' << opt_fmt(r.wall_time_s);
  return out.str();
}

std::vector<Record> run_sweep(const config::ExperimentConfig& cfg) {
  const targets::TargetFunction f = cfg.build_target();
  const int p = f.max_degree();
  const std::vector<long> grid = unique_grid(f.d, cfg.exponents);
  for (const std::string& method : cfg.methods) {
    if (method != "algorithm1" && method != "rf" && method != "ntk")
      throw ConfigError("run_sweep: unknown method '" + method + "'");
  }

  std::vector<SweepCell> cells;
  for (const std::string& method : cfg.methods)
    for (long n : grid)
      for (int seed = 0; seed < cfg.seeds; ++seed) cells.push_back({method, n, seed});

  const auto done = cfg.resume ? load_resume_lines(cfg.out) : std::map<std::string, std::string>{};
  std::vector<Record> records(cells.size());
  std::vector<char> skip(cells.size(), 0);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (done.count(resume_key(cells[i].method, cells[i].n, std::nullopt, cells[i].seed)))
      skip[i] = 1;
  }

  dispatch_cells(cfg.workers, static_cast<long>(cells.size()), [&](long idx) {
    const SweepCell& cell = cells[static_cast<std::size_t>(idx)];
    Record& record = records[static_cast<std::size_t>(idx)];
    record.method = cell.method;
    record.d = f.d;
    record.p = p;
    record.m = cfg.m;
    record.n = cell.n;
    record.seed = cell.seed;
    if (skip[static_cast<std::size_t>(idx)]) return;

    const std::uint64_t cell_seed = rng::derive_seed(
        rng::derive_seed(cfg.master_seed, cell.method, static_cast<std::uint64_t>(cell.n)),
        "seed", static_cast<std::uint64_t>(cell.seed));
    const double t0 = omp_get_wtime();
    try {
      const trainer::TrainConfig tc = cell_train_config(cfg);
      baselines::RiskReport report;
      double lambda = 0.0;
      if (cell.method == "algorithm1") {
        trainer::AlgorithmTrace trace;
        const network::NetworkPredictor predictor =
            trainer::run_algorithm1(f, cell.n, cfg.m, cfg.sigma, tc, cell_seed, &trace);
        lambda = trace.tuned_lambda;
        record.projection_ratio =
            diagnostics::subspace_alignment(trace.W1, f).projection_ratio;
        report = baselines::evaluate(baselines::Predictor(predictor), f, cfg.n_test, cfg.sigma,
                                     rng::derive_seed(cell_seed, "eval"));
      } else if (cell.method == "rf") {
        const network::NetworkPredictor predictor =
            baselines::random_features_fit(f, cell.n, cfg.m, cfg.sigma, tc, cell_seed, &lambda);
        report = baselines::evaluate(baselines::Predictor(predictor), f, cfg.n_test, cfg.sigma,
                                     rng::derive_seed(cell_seed, "eval"));
      } else {
        const baselines::NtkPredictor predictor =
            baselines::ntk_linearized_fit(f, cell.n, cfg.m, cfg.sigma, tc, cell_seed, &lambda);
        report = baselines::evaluate(baselines::Predictor(predictor), f, cfg.n_test, cfg.sigma,
                                     rng::derive_seed(cell_seed, "eval"));
      }
      record.lambda = lambda;
      record.l2_excess = report.l2_excess;
      record.l1_excess = report.l1_excess;
    } catch (const std::exception& e) {
      record.error = e.what();
    }
    record.wall_time_s = omp_get_wtime() - t0;
  });

  // Reuse the stored lines of completed cells verbatim.
  if (!done.empty()) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (!skip[i]) continue;
      records[i].error = "";
      const auto it = done.find(resume_key(cells[i].method, cells[i].n, std::nullopt, cells[i].seed));
      records[i].method = "\x01" + it->second;  // raw-line marker consumed by the writer
    }
  }
  return records;
}

std::vector<Record> run_transfer(const config::ExperimentConfig& cfg) {
  const targets::TargetFunction source = cfg.build_target();
  const targets::TargetFunction target = cfg.build_transfer_target();
  const int p = std::max(source.max_degree(), target.max_degree());
  const std::vector<long> pretrain_grid = unique_grid(source.d, cfg.pretrain_exponents);
  const std::vector<long> target_grid = unique_grid(source.d, cfg.target_exponents);
  for (long N : target_grid)
    if (N < 1) throw ConfigError("run_transfer: target sample counts must be >= 1");

  struct Group {
    long n = 0;
    int seed = 0;
  };
  std::vector<Group> groups;
  for (long n : pretrain_grid)
    for (int seed = 0; seed < cfg.seeds; ++seed) groups.push_back({n, seed});
  const long nN = static_cast<long>(target_grid.size());

  const auto done = cfg.resume ? load_resume_lines(cfg.out) : std::map<std::string, std::string>{};
  std::vector<Record> records(groups.size() * static_cast<std::size_t>(nN));

  dispatch_cells(cfg.workers, static_cast<long>(groups.size()), [&](long gi) {
    const Group& group = groups[static_cast<std::size_t>(gi)];
    const std::uint64_t group_seed = rng::derive_seed(
        rng::derive_seed(cfg.master_seed, "transfer", static_cast<std::uint64_t>(group.n)),
        "seed", static_cast<std::uint64_t>(group.seed));

    bool all_done = true;
    for (long ni = 0; ni < nN; ++ni) {
      if (!done.count(resume_key("transfer", group.n, target_grid[static_cast<std::size_t>(ni)],
                                 group.seed)))
        all_done = false;
    }

    std::optional<network::NetworkPredictor> pretrained;
    std::string pretrain_error;
    if (!all_done) {
      try {
        pretrained = trainer::run_algorithm1(source, group.n, cfg.m, cfg.sigma,
                                             cell_train_config(cfg), group_seed);
      } catch (const std::exception& e) {
        pretrain_error = e.what();
      }
    }

    for (long ni = 0; ni < nN; ++ni) {
      const long N = target_grid[static_cast<std::size_t>(ni)];
      Record& record = records[static_cast<std::size_t>(gi * nN + ni)];
      record.method = "transfer";
      record.d = source.d;
      record.p = p;
      record.m = cfg.m;
      record.n = group.n;
      record.N = N;
      record.seed = group.seed;
      const auto it = done.find(resume_key("transfer", group.n, N, group.seed));
      if (it != done.end()) {
        record.method = "\x01" + it->second;
        continue;
      }
      const double t0 = omp_get_wtime();
      if (!pretrain_error.empty()) {
        record.error = "pretrain: " + pretrain_error;
        record.wall_time_s = omp_get_wtime() - t0;
        continue;
      }
      try {
        const std::uint64_t stage_seed =
            rng::derive_seed(group_seed, "target", static_cast<std::uint64_t>(ni));
        const data::Dataset target_ds =
            data::sample_dataset(target, N, cfg.sigma, rng::derive_seed(stage_seed, "train"));
        const long holdout_n = cfg.train.holdout_n > 0
                                   ? cfg.train.holdout_n
                                   : trainer::default_holdout_n(N, cfg.train.holdout_cap);
        const data::Dataset target_holdout =
            data::sample_dataset(target, holdout_n, cfg.sigma, rng::derive_seed(stage_seed, "holdout"));
        double lambda = 0.0;
        const network::NetworkPredictor finetuned = trainer::retrain_head_transfer(
            *pretrained, target_ds, target_holdout, cell_train_config(cfg), &lambda);
        const baselines::RiskReport report =
            baselines::evaluate(baselines::Predictor(finetuned), target, cfg.n_test, cfg.sigma,
                                rng::derive_seed(stage_seed, "eval"));
        record.lambda = lambda;
        record.l2_excess = report.l2_excess;
        record.l1_excess = report.l1_excess;
      } catch (const std::exception& e) {
        record.error = e.what();
      }
      record.wall_time_s = omp_get_wtime() - t0;
    }
  });
  return records;
}

std::vector<std::string> run_diagnose(const config::ExperimentConfig& cfg) {
  const std::string stem = [&] {
    std::filesystem::path path(cfg.out);
    path.replace_extension();
    return path.string();
  }();
  std::vector<std::string> written;

  // Residual decay of the gradient signal against the leading term.
  {
    const targets::TargetFunction f = cfg.build_target();
    if (f.r != 1)
      throw ConfigError("run_diagnose: the residual study needs a single-index target");
    const auto rows = diagnostics::residual_scaling_study(
        f.components[0], cfg.diag_dims, cfg.n_mc, cfg.trials,
        rng::derive_seed(cfg.master_seed, "residual"));
    const std::string path = stem + "_residual.csv";
    ensure_parent_dir(path);
    std::ofstream out(path);
    out << "d,mean_residual,stderr_mean,mc_stderr,ref_inv_d\n";
    for (const auto& row : rows)
      out << row.d << ',' << fmt(row.mean_residual) << ',' << fmt(row.stderr_mean) << ','
          << fmt(row.mc_stderr) << ',' << fmt(row.ref_inv_d) << '\n';
    written.push_back(path);
  }

  // First-layer alignment with the latent subspace, per (n, seed).
  {
    const targets::TargetFunction f = cfg.build_target();
    const std::string path = stem + "_alignment.csv";
    ensure_parent_dir(path);
    std::ofstream out(path);
    out << "n,seed,projection_ratio,latent_rank\n";
    for (long n : cfg.alignment_n) {
      for (int seed = 0; seed < cfg.alignment_seeds; ++seed) {
        const std::uint64_t cell_seed = rng::derive_seed(
            rng::derive_seed(cfg.master_seed, "alignment", static_cast<std::uint64_t>(n)), "seed",
            static_cast<std::uint64_t>(seed));
        const data::Dataset ds =
            data::sample_dataset(f, n, cfg.sigma, rng::derive_seed(cell_seed, "train"));
        const data::PreprocessStats stats = data::preprocess(ds);
        network::NetworkParams params =
            network::init_symmetric(cfg.m, f.d, rng::derive_seed(cell_seed, "net"));
        const double eta1 =
            cfg.train.eta1 > 0.0 ? cfg.train.eta1 : trainer::default_eta1(n, cfg.m, f.d);
        const Eigen::MatrixXd W1 = trainer::first_layer_step(params, ds, stats, eta1);
        const diagnostics::AlignmentReport report = diagnostics::subspace_alignment(W1, f);
        out << n << ',' << seed << ',' << fmt(report.projection_ratio) << ','
            << report.latent_rank << '\n';
      }
    }
    written.push_back(path);
  }

  // Monte Carlo check of E[v_k(a,b) relu(ax+b)] = x^k.
  {
    const std::string path = stem + "_vk.csv";
    ensure_parent_dir(path);
    std::ofstream out(path);
    out << "mode,k,x,mc_mean,stderr,expected,abs_z\n";
    const int kmax = 4;
    std::vector<double> xs;
    for (int i = 0; i <= 10; ++i) xs.push_back(-1.0 + 0.2 * i);
    for (const auto mode : {diagnostics::VkMode::kUniform, diagnostics::VkMode::kGaussian}) {
      const char* mode_name = mode == diagnostics::VkMode::kUniform ? "uniform" : "gaussian";
      const long cells = (kmax + 1) * static_cast<long>(xs.size());
      const long chunk = kernels::kReduceChunk;
      const long nchunks = (cfg.vk_draws + chunk - 1) / chunk;
      Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(cells, nchunks);
      Eigen::MatrixXd sumsq = Eigen::MatrixXd::Zero(cells, nchunks);
#pragma omp parallel for schedule(static)
      for (long c = 0; c < nchunks; ++c) {
        rng::Stream stream(rng::derive_seed(cfg.master_seed, mode_name,
                                            static_cast<std::uint64_t>(c)));
        const long lo = c * chunk;
        const long hi = std::min(cfg.vk_draws, lo + chunk);
        for (long i = lo; i < hi; ++i) {
          const double a = stream.next_sign();
          const double b = mode == diagnostics::VkMode::kUniform
                               ? stream.next_uniform_in(-1.0, 1.0)
                               : stream.next_gaussian();
          for (int k = 0; k <= kmax; ++k) {
            const double weight = diagnostics::monomial_weight_v(k, a, b, mode);
            if (weight == 0.0) continue;
            for (std::size_t xi = 0; xi < xs.size(); ++xi) {
              const double z = a * xs[xi] + b;
              if (z <= 0.0) continue;
              const double value = weight * z;
              const long cell = k * static_cast<long>(xs.size()) + static_cast<long>(xi);
              sums(cell, c) += value;
              sumsq(cell, c) += value * value;
            }
          }
        }
      }
      Eigen::VectorXd total = Eigen::VectorXd::Zero(cells);
      Eigen::VectorXd total_sq = Eigen::VectorXd::Zero(cells);
      for (long c = 0; c < nchunks; ++c) {
        total += sums.col(c);
        total_sq += sumsq.col(c);
      }
      for (int k = 0; k <= kmax; ++k) {
        for (std::size_t xi = 0; xi < xs.size(); ++xi) {
          const long cell = k * static_cast<long>(xs.size()) + static_cast<long>(xi);
          const double inv_n = 1.0 / static_cast<double>(cfg.vk_draws);
          const double mean = total(cell) * inv_n;
          const double var = std::max(0.0, total_sq(cell) * inv_n - mean * mean);
          const double se = std::sqrt(var * inv_n);
          const double expected = std::pow(xs[xi], k);
          const double z = se > 0.0 ? std::abs(mean - expected) / se : 0.0;
          out << mode_name << ',' << k << ',' << fmt(xs[xi]) << ',' << fmt(mean) << ',' << fmt(se)
              << ',' << fmt(expected) << ',' << fmt(z) << '\n';
        }
      }
    }
    written.push_back(path);
  }
  return written;
}

std::string run_csq_report(const config::ExperimentConfig& cfg) {
  const csq::HardClass cls =
      csq::make_hard_class(cfg.csq_d, cfg.csq_M, cfg.csq_epsilon, cfg.csq_p,
                           rng::derive_seed(cfg.master_seed, "csq"), cfg.csq_max_restarts);
  const double eps_corr = std::pow(cls.epsilon_cert, cls.degree);
  const double bound = csq::csq_query_lower_bound(cls.size(), cfg.csq_tau, eps_corr);
  const long nqueries = cfg.csq_queries >= 0
                            ? cfg.csq_queries
                            : std::max<long>(0, static_cast<long>(std::floor(bound)) - 1);

  ensure_parent_dir(cfg.out);
  std::ofstream out(cfg.out);
  out << "M,d,p,epsilon_cert,tau,query_lower_bound,queries,trial,survivors_after_q_queries,"
         "heuristic_n_from_tau\n";
  const double heuristic_n = 1.0 / (cfg.csq_tau * cfg.csq_tau);
  for (int trial = 0; trial < cfg.csq_trials; ++trial) {
    rng::Stream stream(rng::derive_seed(cfg.master_seed, "csq-game",
                                        static_cast<std::uint64_t>(trial)));
    std::vector<csq::Query> queries;
    queries.reserve(static_cast<std::size_t>(nqueries));
    for (long q = 0; q < nqueries; ++q) {
      csq::Query query;
      query.degree = cls.degree;
      if (stream.next_u64() % 2 == 0) {
        const long index = static_cast<long>(stream.next_u64() % static_cast<std::uint64_t>(cls.size()));
        query.direction = cls.directions.row(index).transpose();
      } else {
        Eigen::VectorXd v(cfg.csq_d);
        for (int k = 0; k < cfg.csq_d; ++k) v(k) = stream.next_gaussian();
        query.direction = v / v.norm();
      }
      queries.push_back(std::move(query));
    }
    const csq::GameResult result = csq::adversary_game(cls, queries, cfg.csq_tau);
    out << cls.size() << ',' << cfg.csq_d << ',' << cls.degree << ',' << fmt(cls.epsilon_cert)
        << ',' << fmt(cfg.csq_tau) << ',' << fmt(bound) << ',' << nqueries << ',' << trial << ','
        << result.survivors.size() << ',' << fmt(heuristic_n) << '\n';
  }
  return cfg.out;
}

int run_validate(const config::ExperimentConfig& cfg) {
  (void)cfg;
  const auto results = validate::run_all();
  return validate::print_report(results);
}

void write_records_csv(const std::string& path, const std::vector<Record>& records) {
  ensure_parent_dir(path);
  std::ofstream out(path);
  out << csv_header() << '\n';
  for (const Record& record : records) {
    if (!record.method.empty() && record.method[0] == '\x01')
      out << record.method.substr(1) << '\n';  // resumed raw line
    else
      out << csv_row(record) << '\n';
  }
}

void write_summary_json(const config::ExperimentConfig& cfg, const std::vector<Record>& records,
                        const std::string& path) {
  nlohmann::json summary;
  summary["environment"] = {{"version", kVersion}, {"master_seed", cfg.master_seed}};
  summary["config"] = {{"d", cfg.target.d},
                       {"m", cfg.m},
                       {"sigma", cfg.sigma},
                       {"seeds", cfg.seeds},
                       {"n_test", cfg.n_test},
                       {"profile", cfg.profile},
                       {"out", cfg.out}};

  struct Agg {
    std::vector<double> l2, l1;
  };
  std::map<std::string, Agg> cells;
  nlohmann::json errors = nlohmann::json::array();
  for (const Record& record : records) {
    if (!record.method.empty() && record.method[0] == '\x01') continue;
    if (!record.error.empty()) {
      errors.push_back({{"method", record.method},
                        {"n", record.n},
                        {"seed", record.seed},
                        {"message", record.error}});
      continue;
    }
    if (!record.l2_excess) continue;
    std::string key = record.method + "|n=" + std::to_string(record.n);
    if (record.N) key += "|N=" + std::to_string(*record.N);
    cells[key].l2.push_back(*record.l2_excess);
    if (record.l1_excess) cells[key].l1.push_back(*record.l1_excess);
  }
  nlohmann::json aggregates;
  for (const auto& [key, agg] : cells) {
    auto stats = [](const std::vector<double>& v) {
      double mean = 0.0;
      for (double x : v) mean += x;
      mean /= static_cast<double>(v.size());
      double var = 0.0;
      for (double x : v) var += (x - mean) * (x - mean);
      if (v.size() > 1) var /= static_cast<double>(v.size() - 1);
      return std::pair<double, double>(mean, std::sqrt(var));
    };
    const auto [l2_mean, l2_std] = stats(agg.l2);
    aggregates[key] = {{"count", agg.l2.size()}, {"l2_mean", l2_mean}, {"l2_std", l2_std}};
    if (!agg.l1.empty()) {
      const auto [l1_mean, l1_std] = stats(agg.l1);
      aggregates[key]["l1_mean"] = l1_mean;
      aggregates[key]["l1_std"] = l1_std;
    }
  }
  summary["cells"] = aggregates;
  summary["errors"] = errors;

  ensure_parent_dir(path);
  std::ofstream out(path);
  out << summary.dump(2) << '\n';
}

int run_experiment(const config::ExperimentConfig& cfg) {
  switch (cfg.kind) {
    case config::Kind::kSweep:
    case config::Kind::kTransfer: {
      const std::vector<Record> records =
          cfg.kind == config::Kind::kSweep ? run_sweep(cfg) : run_transfer(cfg);
      write_records_csv(cfg.out, records);
      std::filesystem::path summary_path(cfg.out);
      summary_path.replace_extension(".summary.json");
      write_summary_json(cfg, records, summary_path.string());
      int errors = 0;
      for (const Record& record : records)
        if (!record.error.empty()) ++errors;
      return errors == 0 ? 0 : 1;
    }
    case config::Kind::kDiagnose:
      run_diagnose(cfg);
      return 0;
    case config::Kind::kCsq:
      run_csq_report(cfg);
      return 0;
    case config::Kind::kValidate:
      return run_validate(cfg) == 0 ? 0 : 1;
  }
  return 2;
}

}  // namespace polyrep::harness
