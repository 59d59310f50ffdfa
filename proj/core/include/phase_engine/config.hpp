#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "phase_engine/bath.hpp"
#include "phase_engine/common.hpp"
#include "phase_engine/dynamics.hpp"
#include "phase_engine/wigner.hpp"

namespace phase_engine {

// Bad key, bad value, or malformed file. The message always names the
// offending key, so a typo cannot silently fall back to a default.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flat mirror of the dotted config tree. Every field has a usable default;
// a run is the defaults plus whatever the file and command line override.
// Enumerated fields are kept as the config words and validated on entry, so
// serialize and parse are exact inverses of each other.
struct RunConfig {
  // system.*
  SystemParams system;

  // bath.*
  SpectralModel bath;
  int n_modes = 256;
  double omega_max_factor = 0.0;  // 0 = cutoff-specific default window
  double temperature = 0.0;
  std::string scheme = "gauss_legendre";

  // coupling.*
  std::string coupling_model = "resonant";  // resonant | qbm

  // initial.*  (kind selects which of the parameters are read)
  std::string initial_kind = "vacuum";
  double q_bar = 0.0, p_bar = 0.0;          // coherent
  double n_bar = 0.0;                       // thermal
  double omega_init = 2.0;                  // quench_thermal
  double temperature_init = 0.0;            // quench_thermal
  int fock_n = 1;                           // fock
  double alpha_re = 2.0, alpha_im = 0.0;    // cat
  int parity = 1;                           // cat, +1 or -1

  // evolution.*
  TimeGridSpec evolution;
  std::string method = "diagonalization";  // diagonalization | volterra

  // grid.*
  bool grid_auto = true;
  GridSpec grid;

  // transition.*  (the eta sweep; values in units of eta_c when relative)
  double eta_min = 0.1;
  double eta_max = 2.0;
  int n_eta = 20;
  bool eta_relative = true;

  // output.*
  std::string format = "csv";  // csv | json
  std::string path = ".";
  std::vector<std::string> emit;  // subset of moments|wigner|transition|validate
  int wigner_stride = 0;          // stored samples per snapshot, 0 = auto
};

// Accepts the native key = value text or, when the first non-space byte is
// '{', the equivalent JSON tree. Unknown keys are errors in both forms.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& file_path);

// Applies one dotted key; used for both file entries and command-line flags.
void apply_override(RunConfig& config, const std::string& key, const std::string& value);

// Canonical text: every key, fixed order, values formatted to round-trip.
// parse_config(serialize_config(c)) reproduces c exactly.
std::string serialize_config(const RunConfig& config);

// FNV-1a fingerprint of the canonical text, as printed in run summaries.
std::string config_hash(const RunConfig& config);

// All accepted keys in canonical order (drives --help and the serializer).
std::vector<std::string> config_keys();

// Conversions into module inputs. Cross-field validation that no single key
// can decide (model pairings, sweep bounds) happens here.
DiscreteBath make_bath(const RunConfig& config);
InitialState make_initial(const RunConfig& config, const DiscreteBath& bath);
PropagatorRecord make_record(const RunConfig& config, const DiscreteBath& bath);
std::vector<double> sweep_etas(const RunConfig& config);

}  // namespace phase_engine
