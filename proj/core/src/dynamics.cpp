#include "phase_engine/dynamics.hpp"

#include <lapacke.h>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include "time_plan.hpp"

namespace phase_engine {

namespace {

void check_uniform_from_zero(const VectorXd& times) {
  if (times.size() < 1 || std::abs(times[0]) > 1e-12) throw std::invalid_argument("time grid must start at 0");
  if (times.size() < 2) return;
  const double h = times[1] - times[0];
  if (!(h > 0.0)) throw std::invalid_argument("time grid must be increasing");
  for (int k = 1; k < times.size(); ++k) {
    if (std::abs(times[k] - k * h) > 1e-9 * std::max(1.0, std::abs(times[k])))
      throw std::invalid_argument("time grid must be uniform");
  }
}

VectorXcd propagator_u_diag(const DiscreteBath& bath, const SystemParams& params, const VectorXd& times) {
  const OneExcitationModes modes = solve_one_excitation(bath, params);
  const VectorXd w2 = modes.overlaps().array().square();
  VectorXcd u(times.size());
  for (int k = 0; k < times.size(); ++k) {
    Complex acc = 0.0;
    for (int j = 0; j < w2.size(); ++j) acc += w2[j] * std::polar(1.0, -modes.energies[j] * times[k]);
    u[k] = acc;
  }
  return u;
}

// Memory-kernel integration. The convolution over the full history is kept
// in per-mode accumulators
//   P_i(k) = trapezoid of e^{+i w_i s} u(s) over [0, t_k],
// so that int_0^t K(t - s) u(s) ds = sum_i C_i^2 e^{-i w_i t} P_i. Stage
// evaluations inside a step extend the trapezoid by a partial panel using
// the stage estimate of u. Each step is O(n) regardless of history length.
//
// Plain trapezoid summation is second order in dt and dominates the error
// budget long before RK4 does. The Euler-Maclaurin endpoint terms,
//   int_a^b f = trap - (h^2/12) (f'(b) - f'(a)) + O(h^4),
// are cheap here because f_i = e^{+i w_i s} u(s) has
// f_i' = e^{+i w_i s} (i w_i u + u'), and u' is available from the right-hand
// side itself. The closed composite part is corrected at step dt and the open
// stage panel at its own width, which makes the memory quadrature fourth
// order to match the integrator.
class VolterraStepper {
 public:
  VolterraStepper(const DiscreteBath& bath, const SystemParams& params, double dt)
      : omega0_(params.omega0), dt_(dt), omegas_(bath.omegas), csq_(bath.couplings.array().square()) {
    const int n = static_cast<int>(omegas_.size());
    p_ = VectorXcd::Ones(n);
    acc_ = VectorXcd::Zero(n);
    dhalf_.resize(n);
    dfull_.resize(n);
    slope_w_.resize(n);
    for (int i = 0; i < n; ++i) {
      dhalf_[i] = std::polar(1.0, -omegas_[i] * 0.5 * dt_);
      dfull_[i] = std::polar(1.0, -omegas_[i] * dt_);
      slope_w_[i] = Complex(0.0, csq_[i] * (omegas_[i] - omega0_));
      total_weight_ += csq_[i];
      freq_weight_ += csq_[i] * omegas_[i];
      d_weight_half_ += csq_[i] * dhalf_[i];
      d_weight_full_ += csq_[i] * dfull_[i];
      fd_weight_half_ += csq_[i] * omegas_[i] * dhalf_[i];
      fd_weight_full_ += csq_[i] * omegas_[i] * dfull_[i];
    }
  }

  Complex u() const { return u_; }

  void step() {
    const Complex k1 = rhs(0, u_);
    const Complex k2 = rhs(1, u_ + 0.5 * dt_ * k1);
    const Complex k3 = rhs(1, u_ + 0.5 * dt_ * k2);
    const Complex k4 = rhs(2, u_ + dt_ * k3);
    const Complex u_next = u_ + (dt_ / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (std::norm(u_next) > 1.0 + 1e-6)
      throw std::runtime_error("propagator left the unit disk; time step " + std::to_string(dt_) + " is too coarse");
    // Close the panel [t_k, t_{k+1}] in every accumulator.
    const int n = static_cast<int>(omegas_.size());
    for (int i = 0; i < n; ++i) {
      const Complex p_next = p_[i] * dfull_[i];
      acc_[i] += 0.5 * dt_ * (std::conj(p_[i]) * u_ + std::conj(p_next) * u_next);
      p_[i] = p_next;
    }
    u_ = u_next;
    ++step_count_;
    if (step_count_ % 4096 == 0) {
      const double t = dt_ * static_cast<double>(step_count_);
      for (int i = 0; i < n; ++i) p_[i] = std::polar(1.0, -omegas_[i] * t);
    }
  }

  // I_i at the current time falls out of the accumulators, carrying the same
  // endpoint correction as the stepper so both quantities share one error
  // order. Called only at stored sample times, so the extra pass is cheap.
  void response_row(VectorXcd& out) const {
    const int n = static_cast<int>(omegas_.size());
    out.resize(n);
    Complex conv = 0.0;
    for (int i = 0; i < n; ++i) conv += csq_[i] * p_[i] * acc_[i];
    const Complex udot = Complex(0.0, -omega0_) * u_ - conv;
    const double w = dt_ * dt_ / 12.0;
    for (int i = 0; i < n; ++i) {
      const Complex slope_end = Complex(0.0, omegas_[i]) * u_ + udot;
      const Complex slope_start = Complex(0.0, omegas_[i] - omega0_) * p_[i];
      out[i] = std::sqrt(csq_[i]) * (p_[i] * acc_[i] - w * (slope_end - slope_start));
    }
  }

 private:
  // stage: 0 at t_k, 1 at t_k + dt/2, 2 at t_k + dt. Assembles the trapezoid
  // value of the memory integral at the stage time, then adds the endpoint
  // corrections. slope0 collects sum_i C_i^2 e^{-i w_i t} f_i'(0), which is
  // exact because u(0) = 1 and u'(0) = -i w0. The stage-end slope uses
  // u' = -i w0 u - conv with the uncorrected conv; the correction already
  // carries dt^2, so that estimate is accurate enough.
  Complex rhs(int stage, Complex u_stage) {
    const double h = 0.5 * static_cast<double>(stage) * dt_;
    const int n = static_cast<int>(omegas_.size());
    Complex conv = 0.0;
    Complex slope0 = 0.0;
    Complex d_weight, fd_weight;
    switch (stage) {
      case 0:
        for (int i = 0; i < n; ++i) {
          conv += csq_[i] * p_[i] * acc_[i];
          slope0 += slope_w_[i] * p_[i];
        }
        d_weight = total_weight_;
        fd_weight = freq_weight_;
        break;
      case 1:
        for (int i = 0; i < n; ++i) {
          const Complex ph = p_[i] * dhalf_[i];
          conv += csq_[i] * ph * acc_[i];
          slope0 += slope_w_[i] * ph;
        }
        conv += 0.5 * h * (d_weight_half_ * u_ + total_weight_ * u_stage);
        d_weight = d_weight_half_;
        fd_weight = fd_weight_half_;
        break;
      default:
        for (int i = 0; i < n; ++i) {
          const Complex ph = p_[i] * dfull_[i];
          conv += csq_[i] * ph * acc_[i];
          slope0 += slope_w_[i] * ph;
        }
        conv += 0.5 * h * (d_weight_full_ * u_ + total_weight_ * u_stage);
        d_weight = d_weight_full_;
        fd_weight = fd_weight_full_;
        break;
    }
    if (stage == 0) udot_base_ = Complex(0.0, -omega0_) * u_ - conv;
    const Complex udot_stage =
        (stage == 0) ? udot_base_ : Complex(0.0, -omega0_) * u_stage - conv;
    const Complex end_base = Complex(0.0, 1.0) * fd_weight * u_ + d_weight * udot_base_;
    const Complex end_stage = Complex(0.0, freq_weight_) * u_stage + total_weight_ * udot_stage;
    conv += (dt_ * dt_ / 12.0) * slope0 - ((dt_ * dt_ - h * h) / 12.0) * end_base -
            (h * h / 12.0) * end_stage;
    return Complex(0.0, -omega0_) * u_stage - conv;
  }

  double omega0_;
  double dt_;
  VectorXd omegas_;
  VectorXd csq_;
  VectorXcd p_;    // e^{-i w_i t_k}
  VectorXcd acc_;  // P_i(k)
  VectorXcd dhalf_, dfull_;
  VectorXcd slope_w_;  // i C_i^2 (w_i - w0)
  double total_weight_ = 0.0;
  double freq_weight_ = 0.0;
  Complex d_weight_half_, d_weight_full_;
  Complex fd_weight_half_, fd_weight_full_;
  Complex udot_base_ = 0.0;
  Complex u_ = 1.0;
  long step_count_ = 0;
};

}  // namespace

CovarianceMatrix vacuum_covariance(const SystemParams& params) {
  const double mw = params.mass * params.omega0;
  return {0.5 / mw, 0.0, 0.5 * mw};
}

CovarianceMatrix thermal_covariance(const SystemParams& params, double n_bar) {
  if (!(n_bar >= 0.0)) throw std::invalid_argument("thermal occupation must be >= 0");
  CovarianceMatrix c = vacuum_covariance(params);
  const double f = 1.0 + 2.0 * n_bar;
  return {f * c.qq, 0.0, f * c.pp};
}

MatrixXd one_excitation_hamiltonian(const DiscreteBath& bath, const SystemParams& params) {
  const int n = bath.size();
  MatrixXd h = MatrixXd::Zero(n + 1, n + 1);
  h(0, 0) = params.omega0;
  for (int i = 0; i < n; ++i) {
    h(0, i + 1) = bath.couplings[i];
    h(i + 1, 0) = bath.couplings[i];
    h(i + 1, i + 1) = bath.omegas[i];
  }
  return h;
}

OneExcitationModes solve_one_excitation(const DiscreteBath& bath, const SystemParams& params) {
  OneExcitationModes modes;
  modes.vectors = one_excitation_hamiltonian(bath, params);
  const lapack_int n = static_cast<lapack_int>(modes.vectors.rows());
  modes.energies.resize(n);
  const lapack_int info =
      LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'U', n, modes.vectors.data(), n, modes.energies.data());
  if (info != 0) throw std::runtime_error("dsyevd failed with info " + std::to_string(info));
  return modes;
}

OneExcitationSpectrum one_excitation_spectrum(const DiscreteBath& bath, const SystemParams& params) {
  const OneExcitationModes modes = solve_one_excitation(bath, params);
  return {modes.energies, modes.overlaps().array().square()};
}

double one_excitation_ground_energy(const DiscreteBath& bath, const SystemParams& params) {
  MatrixXd h = one_excitation_hamiltonian(bath, params);
  const lapack_int n = static_cast<lapack_int>(h.rows());
  lapack_int found = 0;
  VectorXd w(n);
  double z_dummy = 0.0;
  std::vector<lapack_int> isuppz(2);
  const lapack_int info = LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'N', 'I', 'U', n, h.data(), n, 0.0, 0.0, 1, 1,
                                         0.0, &found, w.data(), &z_dummy, 1, isuppz.data());
  if (info != 0 || found < 1) throw std::runtime_error("dsyevr failed with info " + std::to_string(info));
  return w[0];
}

int PropagatorRecord::index_of_time(double t) const {
  const double h = stored_spacing();
  if (!(h > 0.0)) {
    if (std::abs(t) <= 1e-12 && n_stored() > 0) return 0;
    throw std::invalid_argument("record holds no time grid");
  }
  const long idx = std::lround(t / h);
  if (idx < 0 || idx >= n_stored() || std::abs(t - static_cast<double>(idx) * h) > 1e-9 * std::max(1.0, std::abs(t)))
    throw std::invalid_argument("time " + std::to_string(t) + " is not on the stored grid");
  return static_cast<int>(idx);
}

double default_time_step(const DiscreteBath& bath, const SystemParams& params) {
  double omega_max = params.omega0;
  if (bath.size() > 0) omega_max = std::max(omega_max, bath.omegas.maxCoeff());
  return std::min(1e-3 / params.omega0, 0.05 / omega_max);
}

VectorXcd propagator_u(const DiscreteBath& bath, const SystemParams& params, const VectorXd& times,
                       PropagatorMethod method) {
  if (method == PropagatorMethod::diagonalization) return propagator_u_diag(bath, params, times);
  check_uniform_from_zero(times);
  VectorXcd u(times.size());
  u[0] = 1.0;
  if (times.size() < 2) return u;
  VolterraStepper stepper(bath, params, times[1] - times[0]);
  for (int k = 1; k < times.size(); ++k) {
    stepper.step();
    u[k] = stepper.u();
  }
  return u;
}

MatrixXcd response_integrals(const DiscreteBath& bath, const VectorXd& times, const VectorXcd& u_series) {
  check_uniform_from_zero(times);
  if (times.size() != u_series.size()) throw std::invalid_argument("times and u series disagree in length");
  const int n = bath.size();
  const int nt = static_cast<int>(times.size());
  MatrixXcd out = MatrixXcd::Zero(n, nt);
  if (nt < 2) return out;
  const double dt = times[1] - times[0];
  for (int i = 0; i < n; ++i) {
    const Complex e_step = std::polar(1.0, bath.omegas[i] * dt);
    Complex e_k = 1.0;     // e^{+i w_i t_k}
    Complex trap = 0.0;    // running trapezoid of e^{+i w_i s} u(s)
    for (int k = 1; k < nt; ++k) {
      const Complex e_next = e_k * e_step;
      trap += 0.5 * dt * (e_k * u_series[k - 1] + e_next * u_series[k]);
      e_k = e_next;
      out(i, k) = bath.couplings[i] * std::conj(e_k) * trap;
    }
  }
  return out;
}

VectorXd thermal_v(const DiscreteBath& bath, const MatrixXcd& response) {
  const int nt = static_cast<int>(response.cols());
  VectorXd v = VectorXd::Zero(nt);
  if (bath.temperature <= 0.0) return v;
  VectorXd occ(bath.size());
  for (int i = 0; i < bath.size(); ++i) occ[i] = bose_occupation(bath.omegas[i], bath.temperature);
  for (int k = 0; k < nt; ++k) v[k] = (occ.array() * response.col(k).array().abs2()).sum();
  return v;
}

VectorXd thermal_v(const DiscreteBath& bath, const VectorXd& times, const VectorXcd& u_series) {
  return thermal_v(bath, response_integrals(bath, times, u_series));
}

Mat2 resonant_phi(Complex u, const SystemParams& params) {
  const double mw = params.mass * params.omega0;
  Mat2 phi;
  phi << u.real(), -u.imag() / mw, mw * u.imag(), u.real();
  return phi;
}

PropagatorRecord make_resonant_record(const DiscreteBath& bath, const SystemParams& params,
                                      const TimeGridSpec& grid, PropagatorMethod method) {
  const detail::TimePlan plan = detail::make_time_plan(bath, params, grid);
  const int n_stored = plan.n_fine / plan.store_every + 1;
  PropagatorRecord rec;
  rec.kind = PropagatorRecord::Kind::resonant;
  rec.dt = plan.dt;
  rec.store_every = plan.store_every;
  rec.temperature = bath.temperature;
  rec.times = VectorXd::LinSpaced(n_stored, 0.0, plan.dt * plan.n_fine);
  rec.times[0] = 0.0;

  const int n = bath.size();
  rec.u.resize(n_stored);
  rec.response.resize(n, n_stored);

  if (method == PropagatorMethod::diagonalization) {
    // Spectral form of both u and the response integrals:
    //   u(t)   = sum_j V_0j^2 e^{-i e_j t}
    //   I_i(t) = i sum_j V_0j V_ij e^{-i e_j t}
    // the latter being the closed convolution of u against e^{-i w_i s}.
    const OneExcitationModes modes = solve_one_excitation(bath, params);
    const VectorXd w0 = modes.overlaps();
    const MatrixXd vb = modes.vectors.bottomRows(n);
    const int n_modes = static_cast<int>(modes.energies.size());
    VectorXd wp_re(n_modes), wp_im(n_modes);
    for (int k = 0; k < n_stored; ++k) {
      const double t = rec.times[k];
      Complex u_acc = 0.0;
      for (int j = 0; j < n_modes; ++j) {
        const Complex ph = std::polar(w0[j], -modes.energies[j] * t);
        u_acc += w0[j] * ph;
        wp_re[j] = ph.real();
        wp_im[j] = ph.imag();
      }
      rec.u[k] = u_acc;
      if (n > 0) {
        const VectorXd re = vb * wp_re;
        const VectorXd im = vb * wp_im;
        for (int i = 0; i < n; ++i) rec.response(i, k) = Complex(-im[i], re[i]);
      }
    }
  } else {
    VolterraStepper stepper(bath, params, plan.dt);
    VectorXcd row;
    rec.u[0] = 1.0;
    rec.response.col(0).setZero();
    int stored = 1;
    for (int k = 1; k <= plan.n_fine; ++k) {
      stepper.step();
      if (k % plan.store_every == 0) {
        rec.u[stored] = stepper.u();
        stepper.response_row(row);
        rec.response.col(stored) = row;
        ++stored;
      }
    }
  }

  rec.v = thermal_v(bath, rec.response);
  double worst = 0.0;
  for (int k = 0; k < n_stored; ++k) {
    const double total = std::norm(rec.u[k]) + rec.response.col(k).squaredNorm();
    worst = std::max(worst, std::abs(1.0 - total));
  }
  rec.sum_rule_residual = worst;
  return rec;
}

CovarianceMatrix covariance_evolve(const CovarianceMatrix& initial, const PropagatorRecord& record,
                                   const SystemParams& params, double t) {
  if (!initial.positive_definite()) throw std::invalid_argument("initial covariance must be positive definite");
  const int k = record.index_of_time(t);
  const Mat2 a_s = initial.matrix();
  if (record.kind == PropagatorRecord::Kind::resonant) {
    const Complex u = record.u[k];
    const Mat2 phi = resonant_phi(u, params);
    const double fill = 1.0 + 2.0 * record.v[k] - std::norm(u);
    const Mat2 out = phi * a_s * phi.transpose() + fill * vacuum_covariance(params).matrix();
    return CovarianceMatrix::from_matrix(out);
  }
  const Mat2& phi = record.phi[k];
  const Mat2 out = phi * a_s * phi.transpose() + record.noise[k];
  return CovarianceMatrix::from_matrix(out);
}

}  // namespace phase_engine
