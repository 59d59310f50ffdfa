#include "phase_engine/bath.hpp"

#include <cmath>
#include <stdexcept>

#include "phase_engine/quadrature.hpp"

namespace phase_engine {

void SpectralModel::validate() const {
  if (!(eta >= 0.0) || !std::isfinite(eta)) {
    throw std::invalid_argument("SpectralModel: eta must be finite and >= 0");
  }
  if (!(s > 0.0) || !std::isfinite(s)) {
    throw std::invalid_argument("SpectralModel: exponent s must be > 0");
  }
  if (!(omega_c > 0.0) || !std::isfinite(omega_c)) {
    throw std::invalid_argument("SpectralModel: omega_c must be > 0");
  }
}

const char* to_string(CutoffKind kind) {
  switch (kind) {
    case CutoffKind::exponential: return "exponential";
    case CutoffKind::gaussian: return "gaussian";
    case CutoffKind::hard: return "hard";
  }
  return "?";
}

const char* to_string(DiscretizationScheme scheme) {
  switch (scheme) {
    case DiscretizationScheme::gauss_legendre: return "gauss_legendre";
    case DiscretizationScheme::uniform_midpoint: return "uniform_midpoint";
  }
  return "?";
}

double default_omega_max_factor(CutoffKind kind) {
  switch (kind) {
    case CutoffKind::exponential: return 40.0;
    case CutoffKind::gaussian: return 6.0;
    case CutoffKind::hard: return 1.0;
  }
  return 1.0;
}

namespace {

double cutoff_value(CutoffKind kind, double x) {
  switch (kind) {
    case CutoffKind::exponential: return std::exp(-x);
    case CutoffKind::gaussian: return std::exp(-x * x);
    case CutoffKind::hard: return x <= 1.0 ? 1.0 : 0.0;
  }
  return 0.0;
}

double node_window(const SpectralModel& model, double omega_max_factor) {
  double factor = omega_max_factor > 0.0 ? omega_max_factor
                                         : default_omega_max_factor(model.cutoff);
  double window = factor * model.omega_c;
  if (model.cutoff == CutoffKind::hard) window = std::min(window, model.omega_c);
  return window;
}

}  // namespace

double eval_spectral(const SpectralModel& model, double omega) {
  model.validate();
  if (omega <= 0.0) return 0.0;
  return model.eta * std::pow(omega, model.s) * cutoff_value(model.cutoff, omega / model.omega_c);
}

DiscreteBath discretize(const SpectralModel& model, int n_modes, double omega_max_factor,
                        DiscretizationScheme scheme, double temperature) {
  model.validate();
  if (n_modes < 1) throw std::invalid_argument("discretize: n_modes must be >= 1");
  if (temperature < 0.0) throw std::invalid_argument("discretize: temperature must be >= 0");
  const double window = node_window(model, omega_max_factor);

  VectorXd nodes, weights;
  switch (scheme) {
    case DiscretizationScheme::gauss_legendre: {
      auto [x, w] = gauss_legendre(n_modes, 0.0, window);
      nodes = std::move(x);
      weights = std::move(w);
      break;
    }
    case DiscretizationScheme::uniform_midpoint: {
      nodes.resize(n_modes);
      weights.resize(n_modes);
      double h = window / n_modes;
      for (int i = 0; i < n_modes; ++i) {
        nodes[i] = (i + 0.5) * h;
        weights[i] = h;
      }
      break;
    }
  }

  // A node at the origin would sample the w^(s-1) singularity head-on for
  // sub-Ohmic exponents; both schemes above are open, this guards new ones.
  if (model.s < 1.0 && nodes.minCoeff() <= 0.0) {
    throw std::invalid_argument("discretize: scheme places a node at omega <= 0 with s < 1");
  }

  DiscreteBath bath;
  bath.omegas = nodes;
  bath.couplings.resize(n_modes);
  for (int i = 0; i < n_modes; ++i) {
    double s_val = eval_spectral(model, nodes[i]);
    bath.couplings[i] = std::sqrt(s_val * weights[i] / (2.0 * kPi));
  }
  bath.masses = VectorXd::Ones(n_modes);
  bath.temperature = temperature;
  return bath;
}

VectorXd DiscreteBath::position_couplings(const SystemParams& params) const {
  VectorXd g(size());
  for (int i = 0; i < size(); ++i) {
    g[i] = 2.0 * couplings[i] * std::sqrt(params.mass * params.omega0 * masses[i] * omegas[i]);
  }
  return g;
}

namespace {

// For s < 1 the integrals are done in x = w^s, which turns the w^(s-1)
// density near the origin into a constant. For s >= 1 the density is
// already bounded and the substitution would plant an x^(1/s) kink of its
// own, so the original variable is kept.
double self_energy_continuum(const SpectralModel& model, double e, bool slope) {
  const double window = node_window(model, 0.0);
  if (model.s >= 1.0) {
    const double front = model.eta / (2.0 * kPi);
    auto integrand = [&](double w) -> double {
      double cut = cutoff_value(model.cutoff, w / model.omega_c);
      double density = front * std::pow(w, model.s) * cut;
      if (!slope && e == 0.0) return w > 0.0 ? density / w : (model.s > 1.0 ? 0.0 : front * cut);
      double denom = w - e;
      double base = density / denom;
      return slope ? base / denom : base;
    };
    return integrate_adaptive(integrand, 0.0, window, 1e-13, 1e-15);
  }
  const double x_max = std::pow(window, model.s);
  const double inv_s = 1.0 / model.s;
  const double front = model.eta / (2.0 * kPi * model.s);
  auto integrand = [&](double x) -> double {
    double w = std::pow(x, inv_s);
    double cut = cutoff_value(model.cutoff, w / model.omega_c);
    if (!slope && e == 0.0) return front * cut;  // w / (w - 0) cancels exactly
    double denom = w - e;
    double base = front * w * cut / denom;
    return slope ? base / denom : base;
  };
  return integrate_adaptive(integrand, 0.0, x_max, 1e-13, 1e-15);
}

}  // namespace

double self_energy_real(const SpectralModel& model, double e) {
  model.validate();
  if (e > 0.0) {
    throw std::domain_error("self_energy_real: continuum integrand requires e <= 0");
  }
  return self_energy_continuum(model, e, false);
}

double self_energy_real(const DiscreteBath& bath, double e) {
  if (bath.size() == 0) return 0.0;
  if (e >= bath.omegas.minCoeff()) {
    throw std::domain_error("self_energy_real: need e < min bath frequency");
  }
  double sum = 0.0;
  for (int i = 0; i < bath.size(); ++i) {
    sum += bath.couplings[i] * bath.couplings[i] / (bath.omegas[i] - e);
  }
  return sum;
}

double self_energy_slope(const SpectralModel& model, double e) {
  model.validate();
  if (e >= 0.0) {
    throw std::domain_error("self_energy_slope: continuum version requires e < 0");
  }
  return self_energy_continuum(model, e, true);
}

double self_energy_slope(const DiscreteBath& bath, double e) {
  if (bath.size() == 0) return 0.0;
  if (e >= bath.omegas.minCoeff()) {
    throw std::domain_error("self_energy_slope: need e < min bath frequency");
  }
  double sum = 0.0;
  for (int i = 0; i < bath.size(); ++i) {
    double d = bath.omegas[i] - e;
    sum += bath.couplings[i] * bath.couplings[i] / (d * d);
  }
  return sum;
}

double spectral_weight(const SpectralModel& model) {
  model.validate();
  const double window = node_window(model, 0.0);
  if (model.s >= 1.0) {
    const double front = model.eta / (2.0 * kPi);
    auto integrand = [&](double w) -> double {
      return front * std::pow(w, model.s) * cutoff_value(model.cutoff, w / model.omega_c);
    };
    return integrate_adaptive(integrand, 0.0, window, 1e-13, 1e-15);
  }
  const double x_max = std::pow(window, model.s);
  const double inv_s = 1.0 / model.s;
  const double front = model.eta / (2.0 * kPi * model.s);
  auto integrand = [&](double x) -> double {
    double w = std::pow(x, inv_s);
    return front * w * cutoff_value(model.cutoff, w / model.omega_c);
  };
  return integrate_adaptive(integrand, 0.0, x_max, 1e-13, 1e-15);
}

double critical_coupling(const SpectralModel& model, const SystemParams& params) {
  model.validate();
  SpectralModel unit = model;
  unit.eta = 1.0;
  double d0 = self_energy_real(unit, 0.0);
  if (!(d0 > 0.0)) throw std::runtime_error("critical_coupling: D(0) vanished");
  return params.omega0 / d0;
}

}  // namespace phase_engine
