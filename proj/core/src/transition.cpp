#include "phase_engine/transition.hpp"

#include <cmath>
#include <stdexcept>

#include "phase_engine/dynamics.hpp"

namespace phase_engine {

std::string to_string(Phase phase) {
  return phase == Phase::normal ? "normal" : "bound_state";
}

std::optional<double> find_bound_state(const SpectralModel& model, const SystemParams& params) {
  model.validate();
  const auto gap = [&](double e) { return e - params.omega0 + self_energy_real(model, e); };
  if (gap(0.0) <= 0.0) return std::nullopt;

  double lo = -(params.omega0 + self_energy_real(model, -params.omega0) + 1.0);
  int guard = 0;
  while (gap(lo) > 0.0) {
    lo *= 2.0;
    if (++guard > 60) throw std::runtime_error("failed to bracket the bound state");
  }
  double hi = 0.0;
  for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, -lo); ++it) {
    const double mid = 0.5 * (lo + hi);
    (gap(mid) > 0.0 ? hi : lo) = mid;
  }
  double e = 0.5 * (lo + hi);
  // The slope is finite strictly inside the gap, so polish with it.
  for (int it = 0; it < 2; ++it) {
    const double next = e - gap(e) / (1.0 + self_energy_slope(model, e));
    if (!(next < 0.0)) break;
    e = next;
  }
  return e;
}

std::optional<double> find_bound_state(const DiscreteBath& bath, const SystemParams& params) {
  const double e_min = one_excitation_ground_energy(bath, params);
  if (e_min < 0.0) return e_min;
  return std::nullopt;
}

double residue_weight(const SpectralModel& model, double e1) {
  if (!(e1 < 0.0)) throw std::invalid_argument("residue weight needs e1 < 0");
  return 1.0 / (1.0 + self_energy_slope(model, e1));
}

double residue_weight(const DiscreteBath& bath, double e1) {
  if (bath.size() > 0 && !(e1 < bath.omegas.minCoeff()))
    throw std::invalid_argument("residue weight needs e1 below the lowest bath frequency");
  return 1.0 / (1.0 + self_energy_slope(bath, e1));
}

PoleReport classify_coupling(const SpectralModel& model, const SystemParams& params) {
  PoleReport report;
  report.eta = model.eta;
  report.eta_c = critical_coupling(model, params);
  if (std::abs(model.eta - report.eta_c) < 1e-9 * report.eta_c) {
    report.phase = Phase::normal;
    report.boundary = true;
    report.p0_inf = 1.0;
    report.p1_inf = 0.0;
    return report;
  }
  if (model.eta < report.eta_c) {
    report.phase = Phase::normal;
    report.p0_inf = 1.0;
    report.p1_inf = 0.0;
    return report;
  }
  report.phase = Phase::bound_state;
  const auto e1 = find_bound_state(model, params);
  if (!e1) throw std::runtime_error("bound state expected above the critical coupling");
  report.e1 = *e1;
  const double c0sq = residue_weight(model, *e1);
  report.c0sq = c0sq;
  report.p1_inf = c0sq * c0sq;
  report.p0_inf = 1.0 - c0sq * c0sq;
  return report;
}

std::vector<PoleReport> transition_report(const SpectralModel& model, const SystemParams& params,
                                          const VectorXd& eta_values) {
  std::vector<PoleReport> out;
  out.reserve(eta_values.size());
  for (int k = 0; k < eta_values.size(); ++k) {
    SpectralModel point = model;
    point.eta = eta_values[k];
    try {
      out.push_back(classify_coupling(point, params));
    } catch (const std::exception& err) {
      PoleReport bad;
      bad.eta = eta_values[k];
      bad.error = err.what();
      out.push_back(bad);
    }
  }
  return out;
}

}  // namespace phase_engine
