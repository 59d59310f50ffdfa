#pragma once

#include <optional>
#include <vector>

#include "phase_engine/bath.hpp"
#include "phase_engine/common.hpp"

namespace phase_engine {

// Symmetric second moments of (q, p):  C_qq = <q^2> - <q>^2 and so on.
struct CovarianceMatrix {
  double qq = 0.0;
  double qp = 0.0;
  double pp = 0.0;

  Mat2 matrix() const {
    Mat2 m;
    m << qq, qp, qp, pp;
    return m;
  }
  static CovarianceMatrix from_matrix(const Mat2& m) { return {m(0, 0), 0.5 * (m(0, 1) + m(1, 0)), m(1, 1)}; }
  double det() const { return qq * pp - qp * qp; }
  bool positive_definite() const { return qq > 0.0 && det() > 0.0; }
};

// Vacuum covariance diag(1/(2 m w0), m w0 / 2); det = 1/4 saturates the
// uncertainty bound.
CovarianceMatrix vacuum_covariance(const SystemParams& params);

// Thermal state at occupation n_bar: (1 + 2 n_bar) * vacuum.
CovarianceMatrix thermal_covariance(const SystemParams& params, double n_bar);

struct OneExcitationSpectrum {
  VectorXd energies;  // ascending
  VectorXd weights;   // squared system components, sum to 1
};

// Full eigendecomposition of the one-excitation block; row 0 of `vectors`
// holds the system components.
struct OneExcitationModes {
  VectorXd energies;
  MatrixXd vectors;  // column j = eigenvector j
  VectorXd overlaps() const { return vectors.row(0).transpose(); }
};

MatrixXd one_excitation_hamiltonian(const DiscreteBath& bath, const SystemParams& params);
OneExcitationModes solve_one_excitation(const DiscreteBath& bath, const SystemParams& params);
OneExcitationSpectrum one_excitation_spectrum(const DiscreteBath& bath, const SystemParams& params);

// Smallest eigenvalue only; O(n^2) memory and much faster than the full
// decomposition for large baths.
double one_excitation_ground_energy(const DiscreteBath& bath, const SystemParams& params);

enum class PropagatorMethod { diagonalization, volterra };

struct TimeGridSpec {
  double t_max = 50.0;
  double dt = 0.0;      // <= 0: min(1e-3, 0.05 / omega_max) / omega0
  int store_every = 0;  // <= 0: aim for about 1000 stored samples
};

// Time-dependent maps of the reduced mode. For the number-conserving model
// the record holds u(t), the response integrals I_i(t) and the thermal
// weight v(t); for the position-coupled model it holds the classical
// fundamental blocks Phi(t) and the accumulated noise sigma(t).
struct PropagatorRecord {
  enum class Kind { resonant, qbm };

  Kind kind = Kind::resonant;
  double dt = 0.0;  // internal step
  int store_every = 1;
  double temperature = 0.0;
  VectorXd times;      // stored, uniform, times[0] = 0
  VectorXcd u;         // |u(0)| = 1
  MatrixXcd response;  // n_modes x n_stored, I_i(t_k)
  VectorXd v;          // sum_i n(w_i) |I_i|^2, >= 0
  std::vector<Mat2> phi;                     // qbm only
  std::vector<Mat2> noise;                   // qbm only, sigma(t_k)
  std::vector<std::vector<Mat2>> mode_maps;  // optional, [stored][mode]
  std::vector<Mat2> phi_fine;                // qbm only, every internal step
  double sum_rule_residual = 0.0;   // max_k |1 - |u|^2 - sum_i |I_i|^2|
  double canonical_residual = 0.0;  // max_k |Phi J Phi^T + sum M_i J M_i^T - J|

  int n_stored() const { return static_cast<int>(times.size()); }
  double stored_spacing() const { return dt * store_every; }
  // Index of a stored time; throws std::invalid_argument off the grid.
  int index_of_time(double t) const;
};

double default_time_step(const DiscreteBath& bath, const SystemParams& params);

// u(t): survival amplitude of a single excitation, u(0) = 1.
// diagonalization: sum_j w_j exp(-i e_j t) over the eigenmodes.
// volterra: direct integration of the memory-kernel equation
//   du/dt = -i w0 u - int_0^t K(t - s) u(s) ds,  K(t) = sum_i C_i^2 e^{-i w_i t}
// with the history handled by endpoint-corrected trapezoidal accumulators
// inside a classical 4th-order stepper, so the quadrature matches the
// integrator's order. Uniform steps; the accumulators make each step O(n).
VectorXcd propagator_u(const DiscreteBath& bath, const SystemParams& params,
                       const VectorXd& times, PropagatorMethod method);

// I_i(t) = C_i int_0^t u(t - s) e^{-i w_i s} ds by trapezoidal convolution
// on the uniform grid the u samples live on.
MatrixXcd response_integrals(const DiscreteBath& bath, const VectorXd& times,
                             const VectorXcd& u_series);

// v(t_k) = sum_i n(w_i) |I_i(t_k)|^2; identically zero at T = 0.
VectorXd thermal_v(const DiscreteBath& bath, const MatrixXcd& response);
VectorXd thermal_v(const DiscreteBath& bath, const VectorXd& times, const VectorXcd& u_series);

// Phase-space transfer matrix equivalent to multiplication by u in the
// ladder representation.
Mat2 resonant_phi(Complex u, const SystemParams& params);

PropagatorRecord make_resonant_record(const DiscreteBath& bath, const SystemParams& params,
                                      const TimeGridSpec& grid,
                                      PropagatorMethod method = PropagatorMethod::diagonalization);

// A_t = Phi A_S Phi^T + noise, with noise = (1 + 2v - |u|^2) A_0 for the
// number-conserving model and the accumulated sigma(t) for the position
// coupling. Initial covariance must be positive definite.
CovarianceMatrix covariance_evolve(const CovarianceMatrix& initial, const PropagatorRecord& record,
                                   const SystemParams& params, double t);

// Classical fundamental solution of the full (system + bath) linear flow,
// integrated with a classical 4th-order stepper on the internal grid.
// Throws if the canonical-form residual at a stored time exceeds 1e-6.
PropagatorRecord qbm_propagate(const DiscreteBath& bath, const SystemParams& params,
                               const TimeGridSpec& grid, bool with_mode_maps = false);

// Noise block sigma(t) = int_0^t int_0^t Phi(t-s) N(s,s') Phi^T(t-s')
// with N carrying the symmetrized bath correlator; evaluated as a
// double-trapezoid on the stored fine Phi grid, mode by mode. t must be a
// multiple of dt within rounding.
Mat2 qbm_sigma(const DiscreteBath& bath, const SystemParams& params,
               const std::vector<Mat2>& phi_fine, double dt, double t);

}  // namespace phase_engine
