#pragma once

#include <optional>
#include <string>
#include <vector>

#include "phase_engine/bath.hpp"
#include "phase_engine/common.hpp"

namespace phase_engine {

enum class Phase { normal, bound_state };
std::string to_string(Phase phase);

// Lowest pole of the dressed propagator. Continuum: the root of
// e - w0 + D(e) = 0 on e < 0, which exists iff D(0) > w0; the left side is
// strictly increasing there, so bisection brackets it and two Newton steps
// with D'(e) polish it. Discrete: the smallest eigenvalue of the
// one-excitation block, reported when it drops below zero.
std::optional<double> find_bound_state(const SpectralModel& model, const SystemParams& params);
std::optional<double> find_bound_state(const DiscreteBath& bath, const SystemParams& params);

// Pole residue c0^2 = 1 / (1 + D'(e1)). The slope integral only converges
// for e1 strictly inside the gap: e1 < 0 for the continuum, e1 below the
// lowest bath frequency for a discrete bath.
double residue_weight(const SpectralModel& model, double e1);
double residue_weight(const DiscreteBath& bath, double e1);

struct PoleReport {
  double eta = 0.0;
  double eta_c = 0.0;
  Phase phase = Phase::normal;
  bool boundary = false;  // |eta - eta_c| within 1e-9 relative
  std::optional<double> e1;
  std::optional<double> c0sq;
  // Long-time populations of a one-quantum initial condition: the bound
  // pole keeps weight c0^4 in |1>, the rest dephases into vacuum.
  std::optional<double> p0_inf;
  std::optional<double> p1_inf;
  std::optional<std::string> error;
};

// Couplings within 1e-9 relative of eta_c stay classified as normal but
// carry the boundary flag; a marginal pole is not assigned to either side.
PoleReport classify_coupling(const SpectralModel& model, const SystemParams& params);

std::vector<PoleReport> transition_report(const SpectralModel& model, const SystemParams& params,
                                          const VectorXd& eta_values);

}  // namespace phase_engine
