#pragma once

#include <string>

#include "phase_engine/common.hpp"

namespace phase_engine {

enum class CutoffKind { exponential, gaussian, hard };

// S(omega) = eta * omega^s * cutoff(omega / omega_c) for omega > 0, zero on
// the negative half line. Positive-frequency support is what produces a
// sharp transition at eta_c instead of a crossover.
struct SpectralModel {
  double eta = 0.5;
  double s = 1.0;
  double omega_c = 10.0;
  CutoffKind cutoff = CutoffKind::exponential;

  void validate() const;
};

enum class DiscretizationScheme { gauss_legendre, uniform_midpoint };

// Bath modes sampled from a SpectralModel: 2*pi*sum_i C_i^2 delta(w - w_i)
// reproduces S in the n -> infinity limit.
struct DiscreteBath {
  VectorXd omegas;     // ascending, all > 0
  VectorXd couplings;  // C_i >= 0, number-conserving convention
  VectorXd masses;     // bath oscillator masses, default 1
  double temperature = 0.0;

  int size() const { return static_cast<int>(omegas.size()); }

  // g_i = 2 C_i sqrt(m omega0 m_i w_i): the position-position coupling that
  // reduces to the same C_i when the rotating-wave terms are dropped.
  VectorXd position_couplings(const SystemParams& params) const;
};

const char* to_string(CutoffKind kind);
const char* to_string(DiscretizationScheme scheme);

// Default integration ceiling factor: the node window is
// [0, factor * omega_c], wide enough that the neglected tail is below
// double rounding for each cutoff shape.
double default_omega_max_factor(CutoffKind kind);

double eval_spectral(const SpectralModel& model, double omega);

// omega_max_factor <= 0 selects the per-cutoff default. For the hard cutoff
// the window is clamped to omega_c so no node lands above the edge.
DiscreteBath discretize(const SpectralModel& model, int n_modes,
                        double omega_max_factor = 0.0,
                        DiscretizationScheme scheme = DiscretizationScheme::gauss_legendre,
                        double temperature = 0.0);

// D(e) = integral dw S(w) / (2 pi (w - e)), the real self-energy shift.
// Continuum version requires e <= 0; the integrand's w^(s-1) end-point
// singularity at e = 0 is removed by substituting w = x^(1/s).
double self_energy_real(const SpectralModel& model, double e);
double self_energy_real(const DiscreteBath& bath, double e);  // e < min_i w_i

// dD/de = integral dw S(w) / (2 pi (w - e)^2); strictly e < 0 (continuum)
// or e < min_i w_i (discrete).
double self_energy_slope(const SpectralModel& model, double e);
double self_energy_slope(const DiscreteBath& bath, double e);

// Total weight integral S / (2 pi): the n -> infinity limit of sum_i C_i^2.
double spectral_weight(const SpectralModel& model);

// eta_c = omega0 / D(0)|_{eta=1}. Scales linearly in omega0 by construction.
double critical_coupling(const SpectralModel& model, const SystemParams& params);

}  // namespace phase_engine
