#pragma once

#include <string>
#include <vector>

#include "phase_engine/config.hpp"

namespace phase_engine {

struct ValidationCheck {
  std::string name;
  bool passed = false;
  double max_error = 0.0;  // NaN when the check could not run at all
  double tolerance = 0.0;
  std::string note;  // failure context, empty otherwise
};

struct RunResult {
  int exit_code = 0;
  std::vector<std::string> files;  // names written inside output.path
  std::string summary_path;
  std::vector<ValidationCheck> checks;  // filled by the validate target
};

// Numerical invariants re-measured on the configured model: each check
// returns its observed worst error against a pinned tolerance. The resonant
// and position-coupled models have different check lists.
std::vector<ValidationCheck> run_validation(const RunConfig& config);

// Executes one subcommand: builds whatever the emit set needs, writes the
// artifacts plus summary.json into output.path, and returns the file list.
// Identical configs produce byte-identical files. Exit code 3 is reserved
// for the validate subcommand with a failing check.
RunResult run_experiment(const RunConfig& config, const std::string& subcommand);

}  // namespace phase_engine
