// Command-line front end: sweep | transfer | diagnose | csq | validate.

#include <CLI11.hpp>
#include <cstdio>
#include <string>

#include "polyrep/config.hpp"
#include "polyrep/harness.hpp"
#include "polyrep/version.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::string out;
  std::string profile;
  int seeds = -1;
  int workers = -1;
  long master_seed = -1;
  bool resume = false;
  bool resample_stage2 = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "experiment config file");
  cmd->add_option("--out", flags.out, "output CSV path (overrides config)");
  cmd->add_option("--profile", flags.profile, "full|fast (overrides config)");
  cmd->add_option("--seeds", flags.seeds, "number of seeds (overrides config)");
  cmd->add_option("--workers", flags.workers, "cell worker pool size (overrides config)");
  cmd->add_option("--master-seed", flags.master_seed, "master seed (overrides config)");
  cmd->add_flag("--resume", flags.resume, "skip cells already present in the output file");
  cmd->add_flag("--resample-stage2", flags.resample_stage2,
                "draw a fresh sample for the head stage");
}

polyrep::config::ExperimentConfig load(const CommonFlags& flags, polyrep::config::Kind kind) {
  polyrep::config::ExperimentConfig cfg = flags.config_path.empty()
                                              ? polyrep::config::ExperimentConfig{}
                                              : polyrep::config::parse_file(flags.config_path);
  cfg.kind = kind;
  if (!flags.out.empty()) cfg.out = flags.out;
  if (!flags.profile.empty()) cfg.profile = flags.profile;
  if (flags.seeds >= 0) cfg.seeds = flags.seeds;
  if (flags.workers >= 0) cfg.workers = flags.workers;
  if (flags.master_seed >= 0) cfg.master_seed = static_cast<std::uint64_t>(flags.master_seed);
  if (flags.resume) cfg.resume = true;
  if (flags.resample_stage2) cfg.train.resample_stage2 = true;
  // Defaults for sweep exponents come from the parser; a config-less run still
  // needs them.
  if (cfg.exponents.empty())
    for (int i = 0; i <= 16; ++i) cfg.exponents.push_back(0.25 * i);
  polyrep::config::apply_profile(cfg);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Layerwise feature-learning experiments for low-index polynomials"};
  app.set_version_flag("--version", polyrep::kVersion);
  app.require_subcommand(1);

  CommonFlags flags;
  auto* sweep = app.add_subcommand("sweep", "sample-complexity sweep over methods and n");
  auto* transfer = app.add_subcommand("transfer", "pretrain, then retrain the head on a new task");
  auto* diagnose = app.add_subcommand("diagnose", "feature-learning diagnostic tables");
  auto* csq = app.add_subcommand("csq", "quasi-orthogonal class, bounds, adversary game");
  auto* validate = app.add_subcommand("validate", "fast cross-module invariant checks");
  for (auto* cmd : {sweep, transfer, diagnose, csq, validate}) add_common(cmd, flags);

  CLI11_PARSE(app, argc, argv);

  polyrep::config::Kind kind = polyrep::config::Kind::kValidate;
  if (sweep->parsed()) kind = polyrep::config::Kind::kSweep;
  else if (transfer->parsed()) kind = polyrep::config::Kind::kTransfer;
  else if (diagnose->parsed()) kind = polyrep::config::Kind::kDiagnose;
  else if (csq->parsed()) kind = polyrep::config::Kind::kCsq;

  try {
    return polyrep::harness::run_experiment(load(flags, kind));
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
