#pragma once

#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "phase_engine/common.hpp"
#include "phase_engine/dynamics.hpp"

namespace phase_engine {

struct GridSpec {
  double q_min = -6.0, q_max = 6.0;
  double p_min = -6.0, p_max = 6.0;
  int n_q = 201, n_p = 201;
};

// Dense phase-space samples, p fastest.
struct WignerGrid {
  GridSpec spec;
  VectorXd values;

  double q(int iq) const { return spec.q_min + dq() * iq; }
  double p(int ip) const { return spec.p_min + dp() * ip; }
  double dq() const { return spec.n_q > 1 ? (spec.q_max - spec.q_min) / (spec.n_q - 1) : 0.0; }
  double dp() const { return spec.n_p > 1 ? (spec.p_max - spec.p_min) / (spec.n_p - 1) : 0.0; }
  double& at(int iq, int ip) { return values[iq * spec.n_p + ip]; }
  double at(int iq, int ip) const { return values[iq * spec.n_p + ip]; }
};

struct VacuumState {};
struct CoherentState {
  double q_bar = 0.0;
  double p_bar = 0.0;
};
struct ThermalState {
  double n_bar = 0.0;
};
// Ground/thermal state of a different trap frequency, released into the
// coupled evolution at t = 0.
struct QuenchThermalState {
  double omega_init = 2.0;
  double temperature_init = 0.0;
};
struct FockState {
  int n = 1;
};
struct CatState {
  double alpha_re = 2.0;
  double alpha_im = 0.0;
  int parity = +1;  // +1 even, -1 odd superposition of +-alpha
};
// One quantum in the mode singled out by `amplitudes` (system component
// first). Built by make_collective_fock from the lowest one-excitation
// eigenvector; only meaningful for the number-conserving coupling at T = 0.
struct CollectiveFockState {
  VectorXd amplitudes;
};

using InitialState = std::variant<VacuumState, CoherentState, ThermalState, QuenchThermalState,
                                  FockState, CatState, CollectiveFockState>;

InitialState make_collective_fock(const DiscreteBath& bath, const SystemParams& params);

// Mean and covariance of the Gaussian families at t = 0.
Vec2 initial_mean(const InitialState& state, const SystemParams& params);
CovarianceMatrix initial_covariance(const InitialState& state, const SystemParams& params);

// Closed-form evolved quasiprobability. Three families cover every
// supported initial condition:
//  - Gaussian: mean and covariance pushed through the channel.
//  - Fock ladder: weight w and thermal fill v in the isotropic Laguerre
//    form around the vacuum envelope.
//  - Cat: four complex-shifted Gaussians sharing one envelope.
struct EvolvedGaussian {
  Vec2 mean;
  CovarianceMatrix cov;
};
struct EvolvedFock {
  int n = 1;
  double weight = 1.0;  // |u|^2, or |u_tilde|^2 for the collective mode
  double v = 0.0;
};
struct CatTerm {
  Complex coeff;              // integrates to coeff over the plane
  Eigen::Vector2cd beta;      // complex shift in the exponent
  Complex log_prefactor;      // log of coeff * e^{beta^T A^{-1} beta / 2} / (2 pi sqrt det A)
  Eigen::Vector2cd bvec;      // A^{-1} beta
};
struct EvolvedCat {
  CovarianceMatrix cov;  // Gaussian envelope A_t
  std::vector<CatTerm> terms;
};

class EvolvedState {
 public:
  EvolvedState(SystemParams params, EvolvedGaussian g) : params_(params), form_(g) {}
  EvolvedState(SystemParams params, EvolvedFock f) : params_(params), form_(f) {}
  EvolvedState(SystemParams params, EvolvedCat c) : params_(params), form_(std::move(c)) {}

  double wigner(double q, double p) const;
  Vec2 mean() const;
  // Exact second moments for every family; the cat includes the lobe and
  // fringe contributions analytically.
  CovarianceMatrix covariance() const;
  double occupation() const;
  // Gaussian states and the zero-fill Fock ladder have closed purity;
  // everything else goes through grid quadrature.
  std::optional<double> closed_form_purity() const;
  const SystemParams& params() const { return params_; }
  const std::variant<EvolvedGaussian, EvolvedFock, EvolvedCat>& form() const { return form_; }

 private:
  SystemParams params_;
  std::variant<EvolvedGaussian, EvolvedFock, EvolvedCat> form_;
};

// Push an initial condition through the record at stored time t.
EvolvedState evolve_state(const InitialState& initial, const PropagatorRecord& record,
                          const SystemParams& params, double t);
// Same families without a record, at t = 0.
EvolvedState state_at_zero(const InitialState& initial, const SystemParams& params);

GridSpec auto_grid(const EvolvedState& state, int n_q = 201, int n_p = 201, double n_sigma = 6.0);
WignerGrid render_wigner(const EvolvedState& state, const GridSpec& spec);
WignerGrid evolve_wigner(const InitialState& initial, const PropagatorRecord& record,
                         const SystemParams& params, double t, const GridSpec& spec);

WignerGrid wigner_gaussian(const Vec2& mean, const CovarianceMatrix& cov, const GridSpec& spec);
WignerGrid wigner_fock(int n, const SystemParams& params, const GridSpec& spec);

// Long-time limit of a one-quantum initial condition in the bound phase:
// the pole keeps weight c0sq^2 on |1><1|, the rest has dephased to vacuum.
WignerGrid asymptotic_wigner(double c0sq, const SystemParams& params, const GridSpec& spec);
EvolvedState asymptotic_state(double c0sq, const SystemParams& params);

// Position-basis density matrix element <x|rho|y> of a Gaussian state.
Complex rdm_element(const Vec2& mean, const CovarianceMatrix& cov, double x, double y);

struct ObservableSet {
  double norm = 1.0;
  double occupation = 0.0;
  double purity = 1.0;
  bool norm_ok = true;  // |norm - 1| <= 1e-3
};

ObservableSet observables(const WignerGrid& grid, const SystemParams& params);
// Closed-form moments; purity falls back to quadrature on an auto grid.
ObservableSet observables(const EvolvedState& state);

// Characteristic-function route, used to cross-check the closed forms: the
// evolved transform is the initial one at Phi^T k, damped by the channel
// Gaussian. Inverted numerically on a k-box chosen from the envelope.
using FourierFn = std::function<Complex(double kq, double kp)>;
FourierFn initial_fourier(const InitialState& state, const SystemParams& params);
FourierFn evolved_fourier(const InitialState& state, const PropagatorRecord& record,
                          const SystemParams& params, double t);
WignerGrid wigner_from_fourier(const FourierFn& transform, double k_bound_q, double k_bound_p,
                               int n_k, const GridSpec& spec);
// Conservative k-box for the inversion of an evolved state's transform.
void fourier_bounds(const EvolvedState& state, double& k_bound_q, double& k_bound_p);

}  // namespace phase_engine
