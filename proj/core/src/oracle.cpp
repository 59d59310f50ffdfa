#include "phase_engine/oracle.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>

namespace phase_engine::oracle {

namespace {

// cos(sqrt(lambda) t), sin(sqrt(lambda) t)/sqrt(lambda) and
// sqrt(lambda) sin(sqrt(lambda) t), continued through lambda <= 0.
void mode_phases(double lambda, double t, double& c, double& s_over, double& s_times) {
  if (std::abs(lambda) < 1e-20) {
    c = 1.0;
    s_over = t;
    s_times = lambda * t;
    return;
  }
  if (lambda > 0.0) {
    const double w = std::sqrt(lambda);
    c = std::cos(w * t);
    s_over = std::sin(w * t) / w;
    s_times = w * std::sin(w * t);
    return;
  }
  const double k = std::sqrt(-lambda);
  c = std::cosh(k * t);
  s_over = std::sinh(k * t) / k;
  s_times = -k * std::sinh(k * t);
}

}  // namespace

ReferenceModes reference_modes(const DiscreteBath& bath, const SystemParams& params) {
  const int n = bath.size();
  MatrixXd h = MatrixXd::Zero(n + 1, n + 1);
  h(0, 0) = params.omega0;
  for (int i = 0; i < n; ++i) {
    h(0, i + 1) = bath.couplings[i];
    h(i + 1, 0) = bath.couplings[i];
    h(i + 1, i + 1) = bath.omegas[i];
  }
  Eigen::SelfAdjointEigenSolver<MatrixXd> solver(h);
  if (solver.info() != Eigen::Success) throw std::runtime_error("reference eigensolver failed");
  ReferenceModes modes;
  modes.energies = solver.eigenvalues();
  modes.vectors = solver.eigenvectors();
  modes.weights = modes.vectors.row(0).transpose().array().square();
  return modes;
}

double brute_force_population(const ReferenceModes& modes, double t) {
  const int n = static_cast<int>(modes.energies.size());
  VectorXcd z(n);
  for (int j = 0; j < n; ++j) z[j] = std::polar(modes.weights[j], -modes.energies[j] * t);
  double total = 0.0;
  for (int j = 0; j < n; ++j) total += modes.weights[j] * modes.weights[j];
  for (int j = 0; j < n; ++j) {
    const double re_j = z[j].real(), im_j = z[j].imag();
    for (int k = j + 1; k < n; ++k) total += 2.0 * (re_j * z[k].real() + im_j * z[k].imag());
  }
  return total;
}

double me_solution_coherent(Complex gamma, Complex u, double v, const SystemParams& params,
                            double q, double p) {
  const double mw = params.mass * params.omega0;
  const Complex alpha(std::sqrt(0.5 * mw) * q, p / std::sqrt(2.0 * mw));
  const double big_omega = 2.0 / (1.0 + 2.0 * v);
  return 0.5 * big_omega / kPi * std::exp(-big_omega * std::norm(alpha - u * gamma));
}

WignerGrid me_solution_coherent(Complex gamma, const PropagatorRecord& record,
                                const SystemParams& params, double t, const GridSpec& grid) {
  if (record.kind != PropagatorRecord::Kind::resonant)
    throw std::invalid_argument("closed master-equation solution needs the number-conserving model");
  const int k = record.index_of_time(t);
  const Complex u = record.u[k];
  const double v = record.v[k];
  WignerGrid out;
  out.spec = grid;
  out.values.resize(static_cast<long>(grid.n_q) * grid.n_p);
  for (int iq = 0; iq < grid.n_q; ++iq)
    for (int ip = 0; ip < grid.n_p; ++ip)
      out.at(iq, ip) = me_solution_coherent(gamma, u, v, params, out.q(iq), out.p(ip));
  return out;
}

CovarianceMatrix qbm_full_covariance(const DiscreteBath& bath, const SystemParams& params,
                                     const CovarianceMatrix& initial_system, double t) {
  const int n = bath.size();
  const int nm = n + 1;
  VectorXd masses(nm);
  masses[0] = params.mass;
  for (int i = 0; i < n; ++i) masses[i + 1] = bath.masses[i];
  const VectorXd g = bath.position_couplings(params);

  MatrixXd stiffness = MatrixXd::Zero(nm, nm);
  stiffness(0, 0) = params.mass * params.omega0 * params.omega0;
  for (int i = 0; i < n; ++i) {
    stiffness(0, i + 1) = g[i];
    stiffness(i + 1, 0) = g[i];
    stiffness(i + 1, i + 1) = bath.masses[i] * bath.omegas[i] * bath.omegas[i];
  }
  const VectorXd root_m = masses.array().sqrt();
  MatrixXd scaled = stiffness;
  for (int a = 0; a < nm; ++a)
    for (int b = 0; b < nm; ++b) scaled(a, b) /= root_m[a] * root_m[b];

  Eigen::SelfAdjointEigenSolver<MatrixXd> solver(scaled);
  if (solver.info() != Eigen::Success) throw std::runtime_error("normal-mode solver failed");
  const MatrixXd& modes = solver.eigenvectors();
  const VectorXd& lambda = solver.eigenvalues();

  VectorXd pc(nm), ps_over(nm), ps_times(nm);
  for (int r = 0; r < nm; ++r) mode_phases(lambda[r], t, pc[r], ps_over[r], ps_times[r]);
  const MatrixXd cos_block = modes * pc.asDiagonal() * modes.transpose();
  const MatrixXd sin_over = modes * ps_over.asDiagonal() * modes.transpose();
  const MatrixXd sin_times = modes * ps_times.asDiagonal() * modes.transpose();

  MatrixXd flow(2 * nm, 2 * nm);
  for (int a = 0; a < nm; ++a) {
    for (int b = 0; b < nm; ++b) {
      flow(2 * a, 2 * b) = cos_block(a, b) * root_m[b] / root_m[a];
      flow(2 * a, 2 * b + 1) = sin_over(a, b) / (root_m[a] * root_m[b]);
      flow(2 * a + 1, 2 * b) = -sin_times(a, b) * root_m[a] * root_m[b];
      flow(2 * a + 1, 2 * b + 1) = cos_block(a, b) * root_m[a] / root_m[b];
    }
  }

  MatrixXd cov0 = MatrixXd::Zero(2 * nm, 2 * nm);
  cov0.topLeftCorner(2, 2) = initial_system.matrix();
  for (int i = 0; i < n; ++i) {
    const double fill = thermal_coth(bath.omegas[i], bath.temperature);
    const double mw = bath.masses[i] * bath.omegas[i];
    cov0(2 * (i + 1), 2 * (i + 1)) = fill * 0.5 / mw;
    cov0(2 * (i + 1) + 1, 2 * (i + 1) + 1) = fill * 0.5 * mw;
  }
  const MatrixXd cov_t = flow * cov0 * flow.transpose();
  return CovarianceMatrix::from_matrix(cov_t.topLeftCorner(2, 2));
}

double closed_ohmic_self_energy(double eta, double omega_c, double e) {
  if (!(e < 0.0)) throw std::invalid_argument("closed form needs e < 0");
  const double a = -e;
  const double e1 = -std::expint(-a / omega_c);  // E_1(a / omega_c)
  return eta / (2.0 * kPi) * (omega_c - a * std::exp(a / omega_c) * e1);
}

double closed_critical_coupling_exp(double s, double omega_c, double omega0) {
  return 2.0 * kPi * omega0 / (std::pow(omega_c, s) * std::tgamma(s));
}

}  // namespace phase_engine::oracle
