#pragma once

// Fast cross-module invariant checks behind the `validate` subcommand. Each
// check reports the measured quantity so failures are diagnosable from the
// report alone.

#include <string>
#include <vector>

namespace polyrep::validate {

struct CheckResult {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  std::string note;
};

struct FaultInjection {
  // Added to the ReLU Hermite coefficient c_2 inside the checks that consume
  // it; lets tests confirm the checks actually bite.
  double relu_coeff_bias = 0.0;
};

std::vector<CheckResult> run_all(const FaultInjection& fault = {});

// Prints one line per check; returns the number of failures.
int print_report(const std::vector<CheckResult>& results);

}  // namespace polyrep::validate
