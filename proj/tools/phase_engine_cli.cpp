#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "phase_engine/config.hpp"
#include "phase_engine/runner.hpp"
#include "phase_engine/version.hpp"

namespace {

struct Invocation {
  std::string config_path;
  std::vector<std::pair<std::string, std::string>> overrides;
};

int run(const std::string& subcommand, const Invocation& invocation) {
  phase_engine::RunConfig config;
  if (!invocation.config_path.empty()) config = phase_engine::load_config(invocation.config_path);
  for (const auto& [key, value] : invocation.overrides)
    phase_engine::apply_override(config, key, value);

  const phase_engine::RunResult result = phase_engine::run_experiment(config, subcommand);

  for (const phase_engine::ValidationCheck& check : result.checks) {
    if (std::isnan(check.max_error))
      std::printf("%-18s %s  (did not run: %s)\n", check.name.c_str(),
                  check.passed ? "passed" : "failed", check.note.c_str());
    else
      std::printf("%-18s %s  max %.3e  tol %.0e\n", check.name.c_str(),
                  check.passed ? "passed" : "failed", check.max_error, check.tolerance);
  }
  for (const std::string& name : result.files)
    std::printf("wrote %s/%s\n", config.path.c_str(), name.c_str());
  std::printf("wrote %s\n", result.summary_path.c_str());
  if (result.exit_code == 3) std::printf("validation failed\n");
  return result.exit_code;
}

void attach_config_flags(CLI::App* sub, const std::shared_ptr<Invocation>& invocation) {
  sub->add_option("-c,--config", invocation->config_path,
                  "Config file: key = value lines or the JSON equivalent");
  for (const std::string& key : phase_engine::config_keys()) {
    sub->add_option_function<std::string>(
        "--" + key,
        [invocation, key](const std::string& value) {
          invocation->overrides.emplace_back(key, value);
        },
        "Override config key " + key);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact dynamics of a damped mode: spectra, propagators, Wigner functions"};
  app.set_version_flag("--version", phase_engine::kVersion);
  app.require_subcommand(1);

  const std::vector<std::pair<std::string, std::string>> subcommands = {
      {"spectrum", "Discretized bath modes and the one-excitation spectrum"},
      {"evolve", "Propagator record and moment time series"},
      {"wigner", "Phase-space snapshots of the evolved state"},
      {"transition", "Coupling sweep with bound-state classification"},
      {"validate", "Re-measure numerical invariants against pinned tolerances"}};

  std::vector<std::pair<CLI::App*, std::shared_ptr<Invocation>>> parsed;
  for (const auto& [name, description] : subcommands) {
    CLI::App* sub = app.add_subcommand(name, description);
    auto invocation = std::make_shared<Invocation>();
    attach_config_flags(sub, invocation);
    parsed.emplace_back(sub, invocation);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    for (std::size_t i = 0; i < parsed.size(); ++i)
      if (parsed[i].first->parsed()) return run(subcommands[i].first, *parsed[i].second);
  } catch (const phase_engine::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
