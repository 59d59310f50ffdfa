#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "phase_engine/bath.hpp"
#include "phase_engine/dynamics.hpp"
#include "phase_engine/oracle.hpp"
#include "phase_engine/wigner.hpp"

using namespace phase_engine;

namespace {

SpectralModel ohmic(double eta, double omega_c) {
  SpectralModel m;
  m.eta = eta;
  m.s = 1.0;
  m.omega_c = omega_c;
  m.cutoff = CutoffKind::exponential;
  return m;
}

}  // namespace

TEST_CASE("reference eigenmodes solve the two level problem") {
  SystemParams params;
  DiscreteBath bath;
  bath.omegas = VectorXd::Constant(1, params.omega0);
  bath.couplings = VectorXd::Constant(1, 0.25);
  bath.masses = VectorXd::Ones(1);

  const oracle::ReferenceModes modes = oracle::reference_modes(bath, params);
  REQUIRE(modes.energies.size() == 2);
  CHECK(modes.energies[0] == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(modes.energies[1] == doctest::Approx(1.25).epsilon(1e-12));
  CHECK(modes.weights[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(modes.weights[1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("population double sum tracks the survival amplitude") {
  SystemParams params;
  const DiscreteBath bath = discretize(ohmic(0.9, 4.0), 24);
  const oracle::ReferenceModes modes = oracle::reference_modes(bath, params);

  TimeGridSpec grid;
  grid.t_max = 15.0;
  grid.dt = 0.05;
  const PropagatorRecord rec = make_resonant_record(bath, params, grid);
  for (int k = 0; k < rec.n_stored(); ++k) {
    CHECK(std::abs(oracle::brute_force_population(modes, rec.times[k]) - std::norm(rec.u[k])) <
          1e-10);
  }
}

TEST_CASE("closed self energy against direct quadrature") {
  for (double e : {-0.2, -2.0, -9.0}) {
    const double closed = oracle::closed_ohmic_self_energy(1.3, 6.0, e);
    CHECK(self_energy_real(ohmic(1.3, 6.0), e) == doctest::Approx(closed).epsilon(1e-10));
  }
}

TEST_CASE("closed critical coupling against the defining integral") {
  SystemParams params;
  for (double s : {0.5, 1.0, 1.7}) {
    SpectralModel m = ohmic(1.0, 8.0);
    m.s = s;
    CHECK(critical_coupling(m, params) ==
          doctest::Approx(oracle::closed_critical_coupling_exp(s, 8.0, params.omega0))
              .epsilon(1e-10));
  }
}

TEST_CASE("master equation solution is a moving normalized gaussian") {
  SystemParams params;
  const DiscreteBath bath = discretize(ohmic(0.7, 4.0), 64);
  TimeGridSpec grid;
  grid.t_max = 6.0;
  grid.dt = 0.01;
  const PropagatorRecord rec = make_resonant_record(bath, params, grid);

  const Complex gamma(0.9, -0.4);
  const GridSpec spec{-6.0, 6.0, -6.0, 6.0, 241, 241};
  const WignerGrid grid_w = oracle::me_solution_coherent(gamma, rec, params, 6.0, spec);

  double norm = 0.0, peak = -1.0;
  int peak_iq = 0, peak_ip = 0;
  for (int iq = 0; iq < spec.n_q; ++iq) {
    for (int ip = 0; ip < spec.n_p; ++ip) {
      norm += grid_w.at(iq, ip) * grid_w.dq() * grid_w.dp();
      if (grid_w.at(iq, ip) > peak) {
        peak = grid_w.at(iq, ip);
        peak_iq = iq;
        peak_ip = ip;
      }
    }
  }
  CHECK(std::abs(norm - 1.0) < 1e-6);

  // Peak sits on the decayed, rotated mean.
  const Complex moved = rec.u[rec.index_of_time(6.0)] * gamma;
  const double mw = params.mass * params.omega0;
  const double q_bar = moved.real() * std::sqrt(2.0 / mw);
  const double p_bar = moved.imag() * std::sqrt(2.0 * mw);
  CHECK(std::abs(grid_w.q(peak_iq) - q_bar) <= grid_w.dq());
  CHECK(std::abs(grid_w.p(peak_ip) - p_bar) <= grid_w.dp());
}

TEST_CASE("qbm covariance starts from the initial system block") {
  SystemParams params;
  const DiscreteBath bath = discretize(ohmic(0.3, 2.0), 8);
  CovarianceMatrix a0 = vacuum_covariance(params);
  a0.qq *= 1.4;
  const CovarianceMatrix at0 = oracle::qbm_full_covariance(bath, params, a0, 0.0);
  CHECK(std::abs(at0.qq - a0.qq) < 1e-12);
  CHECK(std::abs(at0.qp - a0.qp) < 1e-12);
  CHECK(std::abs(at0.pp - a0.pp) < 1e-12);
}

TEST_CASE("decoupled qbm covariance rotates freely") {
  SystemParams params;
  DiscreteBath bath;
  bath.omegas = VectorXd::Constant(1, 2.0);
  bath.couplings = VectorXd::Zero(1);
  bath.masses = VectorXd::Ones(1);

  // Vacuum is rotation invariant, so the block must not move at all.
  const CovarianceMatrix a0 = vacuum_covariance(params);
  for (double t : {0.7, 3.1}) {
    const CovarianceMatrix at = oracle::qbm_full_covariance(bath, params, a0, t);
    CHECK(std::abs(at.qq - a0.qq) < 1e-12);
    CHECK(std::abs(at.qp) < 1e-12);
    CHECK(std::abs(at.pp - a0.pp) < 1e-12);
  }

  // A squeezed block breathes at 2 w0.
  CovarianceMatrix sq = a0;
  sq.qq *= 2.0;
  const double t = 0.9;
  const CovarianceMatrix at = oracle::qbm_full_covariance(bath, params, sq, t);
  const double c = std::cos(params.omega0 * t), s = std::sin(params.omega0 * t);
  const double mw = params.mass * params.omega0;
  // Phase-flow pushforward of diag(2, 1) in the scaled frame.
  const double expected_qq = sq.qq * c * c + sq.pp * s * s / (mw * mw);
  CHECK(at.qq == doctest::Approx(expected_qq).epsilon(1e-10));
}
