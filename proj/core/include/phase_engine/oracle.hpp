#pragma once

#include "phase_engine/bath.hpp"
#include "phase_engine/common.hpp"
#include "phase_engine/dynamics.hpp"
#include "phase_engine/wigner.hpp"

// Reference implementations used to cross-check the engine. Each one takes
// a route the engine does not: a different eigensolver, exact normal-mode
// propagation instead of stepping, closed master-equation solutions
// instead of channel algebra. None of them call back into the code paths
// they validate.
namespace phase_engine::oracle {

struct ReferenceModes {
  VectorXd energies;
  VectorXd weights;
  MatrixXd vectors;
};

ReferenceModes reference_modes(const DiscreteBath& bath, const SystemParams& params);

// Excited-state survival probability as the explicit double sum over
// eigenmode pairs, cross terms and all.
double brute_force_population(const ReferenceModes& modes, double t);

// Closed solution of the weak-coupling master equation for an initial
// coherent amplitude gamma, evaluated at a phase-space point.
double me_solution_coherent(Complex gamma, Complex u, double v, const SystemParams& params,
                            double q, double p);

// Same solution rendered on a grid, with u and v read off a stored record.
WignerGrid me_solution_coherent(Complex gamma, const PropagatorRecord& record,
                                const SystemParams& params, double t, const GridSpec& grid);

// System covariance block from exact normal-mode propagation of the full
// position-coupled model, bath initially thermal at bath.temperature.
CovarianceMatrix qbm_full_covariance(const DiscreteBath& bath, const SystemParams& params,
                                     const CovarianceMatrix& initial_system, double t);

// Closed self-energy for the s = 1, exponential-cutoff model at e < 0.
double closed_ohmic_self_energy(double eta, double omega_c, double e);

// Closed critical coupling for the exponential cutoff at any s > 0.
double closed_critical_coupling_exp(double s, double omega_c, double omega0);

}  // namespace phase_engine::oracle
