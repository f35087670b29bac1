#include "polyrep/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "polyrep/errors.hpp"

namespace polyrep::config {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string token;
  std::istringstream in(s);
  while (std::getline(in, token, sep)) {
    token = trim(token);
    if (!token.empty()) parts.push_back(token);
  }
  return parts;
}

std::vector<std::string> tokens(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string t;
  while (in >> t) out.push_back(t);
  return out;
}

double to_double(const std::string& s, const std::string& key) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: bad number '" + s + "' for key " + key);
  }
}

long to_long(const std::string& s, const std::string& key) {
  const double v = to_double(s, key);
  if (v != std::floor(v)) throw ConfigError("config: expected integer for key " + key);
  return static_cast<long>(v);
}

bool to_bool(const std::string& s, const std::string& key) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError("config: bad boolean '" + s + "' for key " + key);
}

// Either a whitespace list of numbers or a range "start:step:stop" (inclusive).
std::vector<double> number_list(const std::string& value, const std::string& key) {
  std::vector<double> out;
  for (const std::string& t : tokens(value)) {
    if (t.find(':') != std::string::npos) {
      const auto parts = split(t, ':');
      if (parts.size() != 3) throw ConfigError("config: bad range '" + t + "' for key " + key);
      const double start = to_double(parts[0], key);
      const double step = to_double(parts[1], key);
      const double stop = to_double(parts[2], key);
      if (step <= 0.0) throw ConfigError("config: range step must be positive for key " + key);
      for (double v = start; v <= stop + 1e-9 * step; v += step) out.push_back(v);
    } else {
      out.push_back(to_double(t, key));
    }
  }
  return out;
}

std::vector<std::vector<double>> component_lists(const std::string& value,
                                                 const std::string& key) {
  std::vector<std::vector<double>> out;
  for (const std::string& part : split(value, '|')) {
    std::vector<double> coeffs;
    for (const std::string& t : tokens(part)) coeffs.push_back(to_double(t, key));
    if (coeffs.empty()) throw ConfigError("config: empty component for key " + key);
    out.push_back(std::move(coeffs));
  }
  if (out.empty()) throw ConfigError("config: no components for key " + key);
  return out;
}

void apply_key(ExperimentConfig& cfg, const std::string& section, const std::string& key,
               const std::string& value) {
  const std::string full = section.empty() ? key : section + "." + key;
  if (full == "kind") {
    if (value == "sweep") cfg.kind = Kind::kSweep;
    else if (value == "transfer") cfg.kind = Kind::kTransfer;
    else if (value == "diagnose") cfg.kind = Kind::kDiagnose;
    else if (value == "csq") cfg.kind = Kind::kCsq;
    else if (value == "validate") cfg.kind = Kind::kValidate;
    else throw ConfigError("config: unknown kind '" + value + "'");
  } else if (full == "out") {
    cfg.out = value;
  } else if (full == "master_seed") {
    cfg.master_seed = static_cast<std::uint64_t>(to_long(value, full));
  } else if (full == "profile") {
    if (value != "full" && value != "fast") throw ConfigError("config: profile must be full|fast");
    cfg.profile = value;
  } else if (full == "workers") {
    cfg.workers = static_cast<int>(to_long(value, full));
  } else if (full == "target.d") {
    cfg.target.d = static_cast<int>(to_long(value, full));
  } else if (full == "target.directions") {
    cfg.target.directions = split(value, ';');
    if (cfg.target.directions.size() == 1)
      cfg.target.directions = tokens(cfg.target.directions[0]);
  } else if (full == "target.components") {
    cfg.target.components = component_lists(value, full);
  } else if (full == "target.p_max") {
    cfg.target.p_max = static_cast<int>(to_long(value, full));
  } else if (full == "data.sigma") {
    cfg.sigma = to_double(value, full);
  } else if (full == "model.m") {
    cfg.m = to_long(value, full);
  } else if (full == "train.eta1") {
    cfg.train.eta1 = value == "auto" ? 0.0 : to_double(value, full);
  } else if (full == "train.eta") {
    cfg.train.eta = value == "auto" ? 0.0 : to_double(value, full);
  } else if (full == "train.T") {
    cfg.train.T = to_long(value, full);
  } else if (full == "train.tol") {
    cfg.train.tol = to_double(value, full);
  } else if (full == "train.lambda_grid") {
    if (value == "default") {
      cfg.train.lambda_grid.clear();
    } else {
      cfg.train.lambda_grid = number_list(value, full);
      std::sort(cfg.train.lambda_grid.begin(), cfg.train.lambda_grid.end());
    }
  } else if (full == "train.holdout") {
    cfg.train.holdout_n = value == "auto" ? 0 : to_long(value, full);
  } else if (full == "train.head_solver") {
    if (value == "ridge") cfg.train.head_gd = false;
    else if (value == "gd") cfg.train.head_gd = true;
    else throw ConfigError("config: head_solver must be ridge|gd");
  } else if (full == "train.resample_stage2") {
    cfg.train.resample_stage2 = to_bool(value, full);
  } else if (full == "sweep.exponents") {
    cfg.exponents = number_list(value, full);
  } else if (full == "sweep.seeds" || full == "transfer.seeds") {
    cfg.seeds = static_cast<int>(to_long(value, full));
  } else if (full == "sweep.methods") {
    cfg.methods = tokens(value);
  } else if (full == "sweep.n_test" || full == "transfer.n_test") {
    cfg.n_test = to_long(value, full);
  } else if (full == "transfer.pretrain_exponents") {
    cfg.pretrain_exponents = number_list(value, full);
  } else if (full == "transfer.target_exponents") {
    cfg.target_exponents = number_list(value, full);
  } else if (full == "transfer.target_components") {
    cfg.target_components = component_lists(value, full);
  } else if (full == "diagnose.dims") {
    cfg.diag_dims.clear();
    for (double v : number_list(value, full)) cfg.diag_dims.push_back(static_cast<int>(v));
  } else if (full == "diagnose.n_mc") {
    cfg.n_mc = to_long(value, full);
  } else if (full == "diagnose.trials") {
    cfg.trials = static_cast<int>(to_long(value, full));
  } else if (full == "diagnose.alignment_n") {
    cfg.alignment_n.clear();
    for (double v : number_list(value, full)) cfg.alignment_n.push_back(static_cast<long>(v));
  } else if (full == "diagnose.alignment_seeds") {
    cfg.alignment_seeds = static_cast<int>(to_long(value, full));
  } else if (full == "diagnose.vk_draws") {
    cfg.vk_draws = to_long(value, full);
  } else if (full == "csq.d") {
    cfg.csq_d = static_cast<int>(to_long(value, full));
  } else if (full == "csq.M") {
    cfg.csq_M = static_cast<int>(to_long(value, full));
  } else if (full == "csq.epsilon") {
    cfg.csq_epsilon = to_double(value, full);
  } else if (full == "csq.p") {
    cfg.csq_p = static_cast<int>(to_long(value, full));
  } else if (full == "csq.tau") {
    cfg.csq_tau = to_double(value, full);
  } else if (full == "csq.max_restarts") {
    cfg.csq_max_restarts = static_cast<int>(to_long(value, full));
  } else if (full == "csq.queries") {
    cfg.csq_queries = value == "auto" ? -1 : to_long(value, full);
  } else if (full == "csq.trials") {
    cfg.csq_trials = static_cast<int>(to_long(value, full));
  } else {
    throw ConfigError("config: unknown key '" + full + "'");
  }
}

}  // namespace

targets::TargetFunction TargetSpec::build() const {
  if (directions.empty()) throw ConfigError("config: no target directions");
  if (directions.size() != components.size())
    throw ConfigError("config: need one component list per direction");
  const int r = static_cast<int>(directions.size());
  Eigen::MatrixXd U = Eigen::MatrixXd::Zero(r, d);
  for (int t = 0; t < r; ++t) {
    const std::string& token = directions[static_cast<std::size_t>(t)];
    if (!token.empty() && token[0] == 'e') {
      const long idx = to_long(token.substr(1), "target.directions");
      if (idx < 1 || idx > d) throw ConfigError("config: basis direction out of range: " + token);
      U(t, idx - 1) = 1.0;
    } else {
      const auto coords = number_list(token, "target.directions");
      if (static_cast<int>(coords.size()) != d)
        throw ConfigError("config: explicit direction needs d coordinates");
      for (int k = 0; k < d; ++k) U(t, k) = coords[static_cast<std::size_t>(k)];
    }
  }
  std::vector<hermite::HermiteSeries> series;
  series.reserve(components.size());
  for (const auto& coeffs : components) series.push_back({coeffs});
  return targets::make_target(U, series, p_max);
}

targets::TargetFunction ExperimentConfig::build_transfer_target() const {
  TargetSpec spec = target;
  spec.components = target_components;
  if (spec.components.size() != spec.directions.size())
    throw ConfigError("config: transfer target needs one component per direction");
  return spec.build();
}

ExperimentConfig parse_string(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config: malformed section at line " + std::to_string(lineno));
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: expected key = value at line " + std::to_string(lineno));
    apply_key(cfg, section, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  if (cfg.exponents.empty()) {
    for (int i = 0; i <= 16; ++i) cfg.exponents.push_back(0.25 * i);
  }
  return cfg;
}

ExperimentConfig parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_string(buffer.str());
}

void apply_profile(ExperimentConfig& cfg) {
  if (cfg.profile != "fast") return;
  cfg.n_test = std::min<long>(cfg.n_test, 10000);
  cfg.seeds = std::min(cfg.seeds, 3);
  cfg.alignment_seeds = std::min(cfg.alignment_seeds, 3);
  cfg.n_mc = std::min<long>(cfg.n_mc, 10000);
  cfg.vk_draws = std::min<long>(cfg.vk_draws, 10000);
  cfg.train.holdout_cap = 10000;
}

}  // namespace polyrep::config
