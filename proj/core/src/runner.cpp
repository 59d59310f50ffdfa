#include "phase_engine/runner.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <limits>

#include "phase_engine/io_util.hpp"
#include "phase_engine/oracle.hpp"
#include "phase_engine/transition.hpp"
#include "phase_engine/version.hpp"
#include "phase_engine/wigner.hpp"

namespace phase_engine {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

void add_check(std::vector<ValidationCheck>& checks, const char* name, double tolerance,
               const std::function<double()>& worst_error) {
  ValidationCheck check;
  check.name = name;
  check.tolerance = tolerance;
  try {
    check.max_error = worst_error();
    check.passed = check.max_error < tolerance;
  } catch (const std::exception& e) {
    check.max_error = std::numeric_limits<double>::quiet_NaN();
    check.passed = false;
    check.note = e.what();
  }
  checks.push_back(std::move(check));
}

// A short list of representative stored times: start, middle, end.
std::vector<int> probe_indices(const PropagatorRecord& record) {
  const int last = record.n_stored() - 1;
  std::vector<int> idx = {0};
  if (last / 2 > 0) idx.push_back(last / 2);
  if (last > 0 && last != last / 2) idx.push_back(last);
  return idx;
}

std::vector<ValidationCheck> resonant_checks(const RunConfig& config, const DiscreteBath& bath) {
  std::vector<ValidationCheck> checks;
  const SystemParams& params = config.system;
  const PropagatorRecord diag =
      make_resonant_record(bath, params, config.evolution, PropagatorMethod::diagonalization);

  add_check(checks, "sum_rule", 1e-8, [&] { return diag.sum_rule_residual; });

  add_check(checks, "route_agreement", 1e-6, [&] {
    const PropagatorRecord volterra =
        make_resonant_record(bath, params, config.evolution, PropagatorMethod::volterra);
    double worst = 0.0;
    for (int k = 0; k < diag.n_stored(); ++k)
      worst = std::max(worst, std::abs(diag.u[k] - volterra.u[k]));
    return worst;
  });

  add_check(checks, "pole_consistency", 1e-10, [&] {
    const PoleReport report = classify_coupling(config.bath, params);
    if (report.boundary) return 0.0;
    if (report.phase == Phase::bound_state)
      return std::abs(*report.e1 - params.omega0 + self_energy_real(config.bath, *report.e1));
    return std::max(0.0, self_energy_real(config.bath, 0.0) - params.omega0);
  });

  add_check(checks, "critical_scaling", 1e-12, [&] {
    SystemParams doubled = params;
    doubled.omega0 *= 2.0;
    const double base = critical_coupling(config.bath, params);
    return std::abs(critical_coupling(config.bath, doubled) / (2.0 * base) - 1.0);
  });

  add_check(checks, "population_route", 1e-10, [&] {
    const oracle::ReferenceModes modes = oracle::reference_modes(bath, params);
    double worst = 0.0;
    for (int k = 0; k < diag.n_stored(); ++k) {
      const double population = oracle::brute_force_population(modes, diag.times[k]);
      worst = std::max(worst, std::abs(population - std::norm(diag.u[k])));
    }
    return worst;
  });

  add_check(checks, "gaussian_channel", 1e-8, [&] {
    const double q_bar = config.initial_kind == "coherent" ? config.q_bar : 1.0;
    const double p_bar = config.initial_kind == "coherent" ? config.p_bar : 0.5;
    const double mw = params.mass * params.omega0;
    const Complex gamma(std::sqrt(0.5 * mw) * q_bar, p_bar / std::sqrt(2.0 * mw));
    double worst = 0.0;
    for (int k : probe_indices(diag)) {
      const double t = diag.times[k];
      const EvolvedState state = evolve_state(CoherentState{q_bar, p_bar}, diag, params, t);
      const GridSpec spec = auto_grid(state);
      const WignerGrid engine = render_wigner(state, spec);
      const WignerGrid closed = oracle::me_solution_coherent(gamma, diag, params, t, spec);
      worst = std::max(worst, (engine.values - closed.values).cwiseAbs().maxCoeff());
    }
    return worst;
  });

  add_check(checks, "wigner_norm", 1e-4, [&] {
    const InitialState initial = make_initial(config, bath);
    double worst = 0.0;
    for (int k : probe_indices(diag)) {
      const EvolvedState state = evolve_state(initial, diag, params, diag.times[k]);
      const ObservableSet set = observables(render_wigner(state, auto_grid(state)), params);
      worst = std::max(worst, std::abs(set.norm - 1.0));
    }
    return worst;
  });

  if (config.temperature == 0.0) {
    add_check(checks, "fock1_origin", 1e-10, [&] {
      double worst = 0.0;
      for (int k : probe_indices(diag)) {
        const EvolvedState state = evolve_state(FockState{1}, diag, params, diag.times[k]);
        const double expected = -(2.0 * std::norm(diag.u[k]) - 1.0) / kPi;
        worst = std::max(worst, std::abs(state.wigner(0.0, 0.0) - expected));
      }
      return worst;
    });
  }
  return checks;
}

std::vector<ValidationCheck> qbm_checks(const RunConfig& config, const DiscreteBath& bath) {
  std::vector<ValidationCheck> checks;
  const SystemParams& params = config.system;

  add_check(checks, "canonical_form", 1e-6, [&] {
    const PropagatorRecord record = qbm_propagate(bath, params, config.evolution);
    return record.canonical_residual;
  });

  // Route agreement is checked on a small bath with a step fine enough for
  // the double-trapezoid noise quadrature; it validates the code path, and
  // its cost stays bounded whatever the configured bath size is.
  add_check(checks, "covariance_route", 1e-6, [&] {
    const int n_small = std::min(config.n_modes, 16);
    const DiscreteBath small = discretize(config.bath, n_small, config.omega_max_factor,
                                          config.scheme == "uniform_midpoint"
                                              ? DiscretizationScheme::uniform_midpoint
                                              : DiscretizationScheme::gauss_legendre,
                                          config.temperature);
    TimeGridSpec grid;
    grid.t_max = std::min(config.evolution.t_max, 5.0);
    grid.dt = 0.02 / small.omegas[small.size() - 1];
    grid.store_every = std::max(1, static_cast<int>(std::lround(grid.t_max / grid.dt / 4.0)));
    const PropagatorRecord record = qbm_propagate(small, params, grid);
    const InitialState initial = make_initial(config, small);
    const CovarianceMatrix start = initial_covariance(initial, params);
    double worst = 0.0;
    for (int k = 1; k < record.n_stored(); ++k) {
      const double t = record.times[k];
      const CovarianceMatrix engine = covariance_evolve(start, record, params, t);
      const CovarianceMatrix full = oracle::qbm_full_covariance(small, params, start, t);
      worst = std::max({worst, std::abs(engine.qq - full.qq), std::abs(engine.qp - full.qp),
                        std::abs(engine.pp - full.pp)});
    }
    return worst;
  });
  return checks;
}

std::string moments_csv(const RunConfig& config, const PropagatorRecord& record,
                        const InitialState& initial) {
  const bool resonant = record.kind == PropagatorRecord::Kind::resonant;
  std::string out = "t,re_u,im_u,abs_u,v,c_qq,c_qp,c_pp,occupation,purity\n";
  for (int k = 0; k < record.n_stored(); ++k) {
    const EvolvedState state = evolve_state(initial, record, config.system, record.times[k]);
    const CovarianceMatrix cov = state.covariance();
    std::vector<std::string> row;
    row.reserve(10);
    row.push_back(format_double(record.times[k]));
    if (resonant) {
      row.push_back(format_double(record.u[k].real()));
      row.push_back(format_double(record.u[k].imag()));
      row.push_back(format_double(std::abs(record.u[k])));
      row.push_back(format_double(record.v[k]));
    } else {
      row.insert(row.end(), 4, std::string());
    }
    row.push_back(format_double(cov.qq));
    row.push_back(format_double(cov.qp));
    row.push_back(format_double(cov.pp));
    row.push_back(format_double(state.occupation()));
    const auto purity = state.closed_form_purity();
    row.push_back(purity ? format_double(*purity) : std::string());
    out += join_csv_row(row);
  }
  return out;
}

std::string wigner_csv(const WignerGrid& grid) {
  std::string out = "q,p,w\n";
  for (int iq = 0; iq < grid.spec.n_q; ++iq) {
    const std::string q = format_double(grid.q(iq));
    for (int ip = 0; ip < grid.spec.n_p; ++ip) {
      out += q;
      out += ',';
      out += format_double(grid.p(ip));
      out += ',';
      out += format_double(grid.at(iq, ip));
      out += '\n';
    }
  }
  return out;
}

std::string wigner_json(const WignerGrid& grid) {
  ordered_json j;
  j["grid"] = {{"q_min", grid.spec.q_min}, {"q_max", grid.spec.q_max},
               {"p_min", grid.spec.p_min}, {"p_max", grid.spec.p_max},
               {"n_q", grid.spec.n_q},     {"n_p", grid.spec.n_p}};
  j["values"] = std::vector<double>(grid.values.data(), grid.values.data() + grid.values.size());
  return j.dump(2) + "\n";
}

std::string transition_csv(const std::vector<PoleReport>& reports) {
  std::string out = "eta,eta_c,phase,e1,c0sq,p0_inf,p1_inf\n";
  for (const PoleReport& report : reports) {
    std::vector<std::string> row;
    row.reserve(7);
    row.push_back(format_double(report.eta));
    row.push_back(format_double(report.eta_c));
    if (report.error) {
      row.push_back("error");
      row.insert(row.end(), 4, std::string());
    } else {
      row.push_back(to_string(report.phase));
      row.push_back(report.e1 ? format_double(*report.e1) : std::string());
      row.push_back(report.c0sq ? format_double(*report.c0sq) : std::string());
      row.push_back(report.p0_inf ? format_double(*report.p0_inf) : std::string());
      row.push_back(report.p1_inf ? format_double(*report.p1_inf) : std::string());
    }
    out += join_csv_row(row);
  }
  return out;
}

std::string validate_json(const std::vector<ValidationCheck>& checks) {
  ordered_json array = ordered_json::array();
  for (const ValidationCheck& check : checks) {
    ordered_json entry;
    entry["check_name"] = check.name;
    entry["status"] = check.passed ? "passed" : "failed";
    if (std::isnan(check.max_error))
      entry["max_error"] = nullptr;
    else
      entry["max_error"] = check.max_error;
    entry["tolerance"] = check.tolerance;
    if (!check.note.empty()) entry["note"] = check.note;
    array.push_back(entry);
  }
  return array.dump(2) + "\n";
}

ordered_json pole_json(const PoleReport& report) {
  ordered_json j;
  j["eta"] = report.eta;
  j["eta_c"] = report.eta_c;
  j["phase"] = to_string(report.phase);
  if (report.boundary) j["boundary"] = true;
  if (report.e1) j["e1"] = *report.e1;
  if (report.c0sq) j["c0sq"] = *report.c0sq;
  return j;
}

// Stored-time indices rendered as Wigner snapshots: every stride-th sample,
// last one always included.
std::vector<int> snapshot_indices(const PropagatorRecord& record, int stride) {
  const int last = record.n_stored() - 1;
  if (stride <= 0) stride = std::max(1, (last + 9) / 10);
  std::vector<int> idx;
  for (int k = 0; k <= last; k += stride) idx.push_back(k);
  if (idx.back() != last) idx.push_back(last);
  return idx;
}

}  // namespace

std::vector<ValidationCheck> run_validation(const RunConfig& config) {
  const DiscreteBath bath = make_bath(config);
  return config.coupling_model == "qbm" ? qbm_checks(config, bath) : resonant_checks(config, bath);
}

RunResult run_experiment(const RunConfig& config, const std::string& subcommand) {
  RunResult result;
  const fs::path dir(config.path);
  fs::create_directories(dir);
  const auto write_artifact = [&](const std::string& name, const std::string& content) {
    write_text_file((dir / name).string(), content);
    result.files.push_back(name);
  };

  std::vector<std::string> emit;
  if (subcommand == "spectrum")
    emit = {"spectrum"};
  else if (subcommand == "wigner")
    emit = {"wigner"};
  else if (subcommand == "transition")
    emit = {"transition"};
  else if (subcommand == "validate")
    emit = {"validate"};
  else if (subcommand == "evolve")
    emit = config.emit.empty() ? std::vector<std::string>{"moments"} : config.emit;
  else
    throw ConfigError("unknown subcommand '" + subcommand + "'");

  const bool needs_record =
      std::find(emit.begin(), emit.end(), "moments") != emit.end() ||
      std::find(emit.begin(), emit.end(), "wigner") != emit.end();

  ordered_json headline;
  DiscreteBath bath;
  PropagatorRecord record;
  InitialState initial = VacuumState{};
  if (needs_record || subcommand == "spectrum") {
    bath = make_bath(config);
    if (needs_record) {
      initial = make_initial(config, bath);
      record = make_record(config, bath);
    }
  }

  for (const std::string& target : emit) {
    if (target == "spectrum") {
      std::string modes = "i,omega,coupling\n";
      for (int i = 0; i < bath.size(); ++i)
        modes += join_csv_row({std::to_string(i), format_double(bath.omegas[i]),
                               format_double(bath.couplings[i])});
      write_artifact("bath_modes.csv", modes);
      const OneExcitationSpectrum spectrum = one_excitation_spectrum(bath, config.system);
      std::string levels = "j,energy,weight\n";
      for (int j = 0; j < spectrum.energies.size(); ++j)
        levels += join_csv_row({std::to_string(j), format_double(spectrum.energies[j]),
                                format_double(spectrum.weights[j])});
      write_artifact("spectrum.csv", levels);
      headline["pole"] = pole_json(classify_coupling(config.bath, config.system));
    } else if (target == "moments") {
      write_artifact("moments.csv", moments_csv(config, record, initial));
      const int last = record.n_stored() - 1;
      headline["t_final"] = record.times[last];
      if (record.kind == PropagatorRecord::Kind::resonant)
        headline["abs_u_final"] = std::abs(record.u[last]);
      headline["occupation_final"] =
          evolve_state(initial, record, config.system, record.times[last]).occupation();
    } else if (target == "wigner") {
      const std::vector<int> idx = snapshot_indices(record, config.wigner_stride);
      std::vector<EvolvedState> states;
      states.reserve(idx.size());
      for (int k : idx)
        states.push_back(evolve_state(initial, record, config.system, record.times[k]));
      GridSpec spec = config.grid;
      if (config.grid_auto) {
        spec = auto_grid(states[0], config.grid.n_q, config.grid.n_p);
        for (const EvolvedState& state : states) {
          const GridSpec own = auto_grid(state, config.grid.n_q, config.grid.n_p);
          spec.q_min = std::min(spec.q_min, own.q_min);
          spec.q_max = std::max(spec.q_max, own.q_max);
          spec.p_min = std::min(spec.p_min, own.p_min);
          spec.p_max = std::max(spec.p_max, own.p_max);
        }
      }
      ordered_json times = ordered_json::array();
      for (std::size_t s = 0; s < states.size(); ++s) {
        const WignerGrid grid = render_wigner(states[s], spec);
        const std::string name = "wigner_t" + std::to_string(s) +
                                 (config.format == "json" ? ".json" : ".csv");
        write_artifact(name, config.format == "json" ? wigner_json(grid) : wigner_csv(grid));
        times.push_back(record.times[idx[s]]);
      }
      headline["snapshots"] = states.size();
      headline["snapshot_times"] = times;
    } else if (target == "transition") {
      const std::vector<double> etas = sweep_etas(config);
      const Eigen::Map<const VectorXd> eta_values(etas.data(), static_cast<long>(etas.size()));
      const std::vector<PoleReport> reports =
          transition_report(config.bath, config.system, eta_values);
      write_artifact("transition.csv", transition_csv(reports));
      headline["eta_c"] = reports.empty() ? 0.0 : reports.front().eta_c;
      int flips = 0;
      for (std::size_t i = 1; i < reports.size(); ++i)
        flips += reports[i].phase != reports[i - 1].phase ? 1 : 0;
      headline["phase_changes"] = flips;
    } else if (target == "validate") {
      result.checks = run_validation(config);
      write_artifact("validate.json", validate_json(result.checks));
      int failed = 0;
      for (const ValidationCheck& check : result.checks) failed += check.passed ? 0 : 1;
      headline["checks_passed"] = static_cast<int>(result.checks.size()) - failed;
      headline["checks_failed"] = failed;
      if (failed > 0 && subcommand == "validate") result.exit_code = 3;
    }
  }

  ordered_json summary;
  summary["tool"] = "phase-engine";
  summary["version"] = kVersion;
  summary["subcommand"] = subcommand;
  summary["config_hash"] = config_hash(config);
  summary["files"] = result.files;
  summary["headline"] = headline;
  const fs::path summary_file = dir / "summary.json";
  write_text_file(summary_file.string(), summary.dump(2) + "\n");
  result.summary_path = summary_file.string();
  return result;
}

}  // namespace phase_engine
