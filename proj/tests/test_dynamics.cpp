#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>

#include "phase_engine/bath.hpp"
#include "phase_engine/dynamics.hpp"
#include "phase_engine/transition.hpp"

using namespace phase_engine;

namespace {

DiscreteBath single_mode(double omega, double coupling) {
  DiscreteBath bath;
  bath.omegas = VectorXd::Constant(1, omega);
  bath.couplings = VectorXd::Constant(1, coupling);
  bath.masses = VectorXd::Ones(1);
  return bath;
}

SpectralModel ohmic(double eta, double omega_c = 10.0) {
  SpectralModel m;
  m.eta = eta;
  m.s = 1.0;
  m.omega_c = omega_c;
  m.cutoff = CutoffKind::exponential;
  return m;
}

TimeGridSpec grid_spec(double t_max, double dt, int store_every = 0) {
  TimeGridSpec g;
  g.t_max = t_max;
  g.dt = dt;
  g.store_every = store_every;
  return g;
}

}  // namespace

TEST_CASE("uncoupled mode keeps its free rotation") {
  SystemParams params;
  const DiscreteBath bath = single_mode(2.0, 0.0);
  for (PropagatorMethod method : {PropagatorMethod::diagonalization, PropagatorMethod::volterra}) {
    const PropagatorRecord rec = make_resonant_record(bath, params, grid_spec(10.0, 1e-3, 100), method);
    for (int k = 0; k < rec.n_stored(); ++k) {
      const Complex expected = std::polar(1.0, -params.omega0 * rec.times[k]);
      CHECK(std::abs(rec.u[k] - expected) < 1e-10);
    }
  }
}

TEST_CASE("degenerate single mode beats at the coupling frequency") {
  // One bath mode on resonance: u(t) = e^{-i w0 t} cos(C t).
  SystemParams params;
  const double c = 0.1;
  const DiscreteBath bath = single_mode(params.omega0, c);

  const PropagatorRecord diag =
      make_resonant_record(bath, params, grid_spec(20.0, 0.01), PropagatorMethod::diagonalization);
  const PropagatorRecord volt =
      make_resonant_record(bath, params, grid_spec(20.0, 1e-3, 10), PropagatorMethod::volterra);

  double worst_diag = 0.0;
  for (int k = 0; k < diag.n_stored(); ++k) {
    const Complex expected = std::polar(1.0, -params.omega0 * diag.times[k]) * std::cos(c * diag.times[k]);
    worst_diag = std::max(worst_diag, std::abs(diag.u[k] - expected));
  }
  CHECK(worst_diag < 1e-12);

  double worst_volt = 0.0;
  for (int k = 0; k < volt.n_stored(); ++k) {
    const Complex expected = std::polar(1.0, -params.omega0 * volt.times[k]) * std::cos(c * volt.times[k]);
    worst_volt = std::max(worst_volt, std::abs(volt.u[k] - expected));
  }
  CHECK(worst_volt < 1e-8);
}

TEST_CASE("sum rule saturates on the stored record") {
  SystemParams params;
  const DiscreteBath bath = discretize(ohmic(0.4), 128);
  const PropagatorRecord rec = make_resonant_record(bath, params, grid_spec(50.0, 0.05));
  CHECK(rec.sum_rule_residual < 1e-12);

  // Same identity straight from the stored rows.
  for (int k : {0, rec.n_stored() / 2, rec.n_stored() - 1}) {
    const double total = std::norm(rec.u[k]) + rec.response.col(k).squaredNorm();
    CHECK(std::abs(1.0 - total) < 1e-12);
  }
}

TEST_CASE("integration routes agree through the transition") {
  SystemParams params;
  const SpectralModel model = ohmic(1.0);
  const double eta_c = critical_coupling(model, params);
  const DiscreteBath bath = discretize(ohmic(2.0 * eta_c), 64, 0.0,
                                       DiscretizationScheme::gauss_legendre, params.omega0);
  const TimeGridSpec grid = grid_spec(20.0, 1e-3, 20);

  const PropagatorRecord diag = make_resonant_record(bath, params, grid, PropagatorMethod::diagonalization);
  const PropagatorRecord volt = make_resonant_record(bath, params, grid, PropagatorMethod::volterra);

  double worst_u = 0.0, worst_v = 0.0;
  for (int k = 0; k < diag.n_stored(); ++k) {
    worst_u = std::max(worst_u, std::abs(diag.u[k] - volt.u[k]));
    worst_v = std::max(worst_v, std::abs(diag.v[k] - volt.v[k]));
  }
  CHECK(worst_u < 1e-6);
  CHECK(worst_v < 1e-6);
}

TEST_CASE("survival amplitude never leaves the unit disc") {
  SystemParams params;
  const DiscreteBath bath = discretize(ohmic(1.5, 4.0), 96);
  const PropagatorRecord rec = make_resonant_record(bath, params, grid_spec(40.0, 0.02));
  for (int k = 0; k < rec.n_stored(); ++k) CHECK(std::abs(rec.u[k]) <= 1.0 + 1e-9);
  CHECK(std::abs(rec.u[0] - Complex(1.0, 0.0)) < 1e-15);
}

TEST_CASE("thermal weight is zero at T = 0 and nonnegative otherwise") {
  SystemParams params;
  const SpectralModel model = ohmic(0.6, 4.0);

  const DiscreteBath cold = discretize(model, 64);
  const PropagatorRecord rec0 = make_resonant_record(cold, params, grid_spec(10.0, 0.01));
  CHECK(rec0.v.cwiseAbs().maxCoeff() == 0.0);

  const DiscreteBath warm = discretize(model, 64, 0.0, DiscretizationScheme::gauss_legendre, 1.0);
  const PropagatorRecord rec1 = make_resonant_record(warm, params, grid_spec(10.0, 0.01));
  CHECK(std::abs(rec1.v[0]) < 1e-24);  // response at t = 0 only vanishes to rounding
  CHECK(rec1.v.minCoeff() >= 0.0);
  CHECK(rec1.v[rec1.n_stored() - 1] > 1e-4);  // the mode actually fills up
}

TEST_CASE("record bookkeeping") {
  SystemParams params;
  const DiscreteBath bath = discretize(ohmic(0.4, 2.0), 32);
  const PropagatorRecord rec = make_resonant_record(bath, params, grid_spec(5.0, 1e-3, 500));

  CHECK(rec.stored_spacing() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(rec.n_stored() == 11);
  CHECK(rec.index_of_time(0.0) == 0);
  CHECK(rec.index_of_time(2.5) == 5);
  CHECK(rec.index_of_time(5.0) == 10);
  CHECK_THROWS_AS(rec.index_of_time(2.51), std::invalid_argument);
  CHECK_THROWS_AS(rec.index_of_time(5.5), std::invalid_argument);
}

TEST_CASE("thinned storage samples the dense solution") {
  SystemParams params;
  const DiscreteBath bath = discretize(ohmic(0.8, 2.0), 48);
  const PropagatorRecord dense = make_resonant_record(bath, params, grid_spec(4.0, 1e-3, 1),
                                                      PropagatorMethod::volterra);
  const PropagatorRecord thin = make_resonant_record(bath, params, grid_spec(4.0, 1e-3, 40),
                                                     PropagatorMethod::volterra);
  for (int k = 0; k < thin.n_stored(); ++k) {
    const int j = dense.index_of_time(thin.times[k]);
    CHECK(std::abs(thin.u[k] - dense.u[j]) < 1e-13);
  }
}

TEST_CASE("stepper demands a uniform grid, spectral summation does not") {
  SystemParams params;
  const DiscreteBath bath = discretize(ohmic(0.4, 2.0), 16);
  VectorXd uneven(3);
  uneven << 0.0, 0.1, 0.3;
  CHECK_THROWS_AS(propagator_u(bath, params, uneven, PropagatorMethod::volterra),
                  std::invalid_argument);

  const VectorXcd u = propagator_u(bath, params, uneven, PropagatorMethod::diagonalization);
  CHECK(std::abs(u[0] - Complex(1.0, 0.0)) < 1e-14);
  VectorXd dense = VectorXd::LinSpaced(4, 0.0, 0.3);  // contains t = 0.1 and 0.3
  const VectorXcd v = propagator_u(bath, params, dense, PropagatorMethod::diagonalization);
  CHECK(std::abs(u[1] - v[1]) < 1e-14);
  CHECK(std::abs(u[2] - v[3]) < 1e-14);
}
