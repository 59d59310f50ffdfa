#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "phase_engine/dynamics.hpp"
#include "time_plan.hpp"

namespace phase_engine {

namespace {

// The full flow is integrated transposed: column r of Y is row r of the
// fundamental matrix, so the sparse drift application walks contiguous
// memory. Layout: (q, p, q_1, p_1, ...).
class QbmFlow {
 public:
  QbmFlow(const DiscreteBath& bath, const SystemParams& params)
      : n_(bath.size()),
        inv_m_(1.0 / params.mass),
        spring_(params.mass * params.omega0 * params.omega0),
        g_(bath.position_couplings(params)),
        inv_mb_(bath.masses.cwiseInverse()),
        spring_b_((bath.masses.array() * bath.omegas.array().square()).matrix()) {}

  int dim() const { return 2 * (n_ + 1); }

  void drift(const MatrixXd& y, MatrixXd& out) const {
    out.col(0) = inv_m_ * y.col(1);
    out.col(1) = -spring_ * y.col(0);
    for (int i = 0; i < n_; ++i) {
      const int qi = 2 + 2 * i;
      out.col(1) -= g_[i] * y.col(qi);
      out.col(qi) = inv_mb_[i] * y.col(qi + 1);
      out.col(qi + 1) = -spring_b_[i] * y.col(qi) - g_[i] * y.col(0);
    }
  }

 private:
  int n_;
  double inv_m_, spring_;
  VectorXd g_, inv_mb_, spring_b_;
};

Mat2 symplectic_unit() {
  Mat2 j;
  j << 0.0, 1.0, -1.0, 0.0;
  return j;
}

}  // namespace

Mat2 qbm_sigma(const DiscreteBath& bath, const SystemParams& params, const std::vector<Mat2>& phi_fine,
               double dt, double t) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  const long k_max = static_cast<long>(phi_fine.size()) - 1;
  const long big_k = std::lround(t / dt);
  if (big_k < 0 || big_k > k_max || std::abs(t - static_cast<double>(big_k) * dt) > 1e-9 * std::max(1.0, t))
    throw std::invalid_argument("time " + std::to_string(t) + " is not on the fine grid");
  Mat2 sigma = Mat2::Zero();
  if (big_k == 0 || bath.size() == 0) return sigma;

  // Trapezoid samples of Phi(t - s) e_2 over s = j dt.
  std::vector<double> col_q(big_k + 1), col_p(big_k + 1);
  for (long j = 0; j <= big_k; ++j) {
    const Mat2& phi = phi_fine[big_k - j];
    const double w = (j == 0 || j == big_k) ? 0.5 * dt : dt;
    col_q[j] = w * phi(0, 1);
    col_p[j] = w * phi(1, 1);
  }

  const VectorXd g = bath.position_couplings(params);
  for (int i = 0; i < bath.size(); ++i) {
    const double omega = bath.omegas[i];
    const Complex rot = std::polar(1.0, omega * dt);
    Complex z = 1.0;  // e^{i w_i s}
    double xc_q = 0.0, xc_p = 0.0, xs_q = 0.0, xs_p = 0.0;
    for (long j = 0; j <= big_k; ++j) {
      const double c = z.real(), s = z.imag();
      xc_q += col_q[j] * c;
      xc_p += col_p[j] * c;
      xs_q += col_q[j] * s;
      xs_p += col_p[j] * s;
      z *= rot;
      if ((j & 8191) == 8191) z = std::polar(1.0, omega * dt * static_cast<double>(j + 1));
    }
    const double kappa =
        g[i] * g[i] * thermal_coth(omega, bath.temperature) / (2.0 * bath.masses[i] * omega);
    sigma(0, 0) += kappa * (xc_q * xc_q + xs_q * xs_q);
    sigma(0, 1) += kappa * (xc_q * xc_p + xs_q * xs_p);
    sigma(1, 1) += kappa * (xc_p * xc_p + xs_p * xs_p);
  }
  sigma(1, 0) = sigma(0, 1);
  return sigma;
}

PropagatorRecord qbm_propagate(const DiscreteBath& bath, const SystemParams& params,
                               const TimeGridSpec& grid, bool with_mode_maps) {
  const detail::TimePlan plan = detail::make_time_plan(bath, params, grid);
  const int n_stored = plan.n_fine / plan.store_every + 1;
  const int n = bath.size();

  PropagatorRecord rec;
  rec.kind = PropagatorRecord::Kind::qbm;
  rec.dt = plan.dt;
  rec.store_every = plan.store_every;
  rec.temperature = bath.temperature;
  rec.times = VectorXd::LinSpaced(n_stored, 0.0, plan.dt * plan.n_fine);
  rec.times[0] = 0.0;
  rec.phi.reserve(n_stored);
  rec.phi_fine.reserve(plan.n_fine + 1);
  if (with_mode_maps) rec.mode_maps.reserve(n_stored);

  const QbmFlow flow(bath, params);
  const int dim = flow.dim();
  MatrixXd y = MatrixXd::Identity(dim, dim);
  MatrixXd k1(dim, dim), k2(dim, dim), k3(dim, dim), k4(dim, dim), tmp(dim, dim);

  const Mat2 j2 = symplectic_unit();
  double worst = 0.0;
  auto harvest = [&](const MatrixXd& state) {
    const Mat2 phi = state.topLeftCorner(2, 2).transpose();
    rec.phi.push_back(phi);
    Mat2 resid = phi * j2 * phi.transpose() - j2;
    std::vector<Mat2> maps;
    if (with_mode_maps) maps.reserve(n);
    for (int i = 0; i < n; ++i) {
      const Mat2 mi = state.block(2 + 2 * i, 0, 2, 2).transpose();
      resid += mi * j2 * mi.transpose();
      if (with_mode_maps) maps.push_back(mi);
    }
    if (with_mode_maps) rec.mode_maps.push_back(std::move(maps));
    worst = std::max(worst, resid.cwiseAbs().maxCoeff());
  };

  rec.phi_fine.push_back(Mat2::Identity());
  harvest(y);
  const double h = plan.dt;
  for (int step = 1; step <= plan.n_fine; ++step) {
    flow.drift(y, k1);
    tmp = y + 0.5 * h * k1;
    flow.drift(tmp, k2);
    tmp = y + 0.5 * h * k2;
    flow.drift(tmp, k3);
    tmp = y + h * k3;
    flow.drift(tmp, k4);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    rec.phi_fine.push_back(y.topLeftCorner(2, 2).transpose());
    if (step % plan.store_every == 0) harvest(y);
  }
  rec.canonical_residual = worst;
  if (worst > 1e-6)
    throw std::runtime_error("canonical form drifted by " + std::to_string(worst) +
                             "; refine the time step");

  rec.noise.reserve(n_stored);
  for (int k = 0; k < n_stored; ++k)
    rec.noise.push_back(qbm_sigma(bath, params, rec.phi_fine, rec.dt, rec.times[k]));
  return rec;
}

}  // namespace phase_engine
