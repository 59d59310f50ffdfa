#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "phase_engine/bath.hpp"
#include "phase_engine/dynamics.hpp"
#include "phase_engine/oracle.hpp"
#include "phase_engine/transition.hpp"

using namespace phase_engine;

namespace {

SpectralModel exp_model(double eta, double s = 1.0, double omega_c = 10.0) {
  SpectralModel m;
  m.eta = eta;
  m.s = s;
  m.omega_c = omega_c;
  m.cutoff = CutoffKind::exponential;
  return m;
}

}  // namespace

TEST_CASE("critical coupling closed values") {
  SystemParams params;
  // eta_c = 2 pi omega0 / (wc^s Gamma(s)) for the exponential cutoff.
  CHECK(std::abs(critical_coupling(exp_model(1.0, 1.0), params) - 2.0 * M_PI / 10.0) < 1e-12);
  CHECK(std::abs(critical_coupling(exp_model(1.0, 2.0), params) - 2.0 * M_PI / 100.0) < 1e-12);
  const double sqrt_pi = std::sqrt(M_PI);
  CHECK(critical_coupling(exp_model(1.0, 0.5), params) ==
        doctest::Approx(2.0 * M_PI / (std::sqrt(10.0) * sqrt_pi)).epsilon(1e-12));
}

TEST_CASE("pole appears exactly at the critical coupling") {
  SystemParams params;
  const double eta_c = critical_coupling(exp_model(1.0), params);

  const PoleReport below = classify_coupling(exp_model(0.99 * eta_c), params);
  CHECK(below.phase == Phase::normal);
  CHECK(!below.e1.has_value());
  CHECK(!below.boundary);

  const PoleReport above = classify_coupling(exp_model(1.01 * eta_c), params);
  CHECK(above.phase == Phase::bound_state);
  REQUIRE(above.e1.has_value());
  CHECK(*above.e1 < 0.0);
  REQUIRE(above.c0sq.has_value());
  CHECK(*above.c0sq > 0.0);
  CHECK(*above.c0sq < 1.0);
}

TEST_CASE("couplings inside the boundary window are flagged") {
  SystemParams params;
  const double eta_c = critical_coupling(exp_model(1.0), params);
  const PoleReport edge = classify_coupling(exp_model(eta_c * (1.0 + 1e-10)), params);
  CHECK(edge.boundary);
  CHECK(edge.phase == Phase::normal);
}

TEST_CASE("bound energy satisfies the pole equation") {
  SystemParams params;
  const SpectralModel m = exp_model(2.0 * critical_coupling(exp_model(1.0), params));
  const PoleReport rep = classify_coupling(m, params);
  REQUIRE(rep.e1.has_value());
  CHECK(std::abs(*rep.e1 - params.omega0 + self_energy_real(m, *rep.e1)) < 1e-11);

  // Residue from the slope of the pole equation.
  const double slope = self_energy_slope(m, *rep.e1);
  CHECK(*rep.c0sq == doctest::Approx(1.0 / (1.0 + slope)).epsilon(1e-12));
  CHECK(residue_weight(m, *rep.e1) == doctest::Approx(*rep.c0sq).epsilon(1e-12));
}

TEST_CASE("two level limit splits symmetrically") {
  // One bath mode on resonance: eigenstates at w0 -+ C, residue 1/2 each.
  SystemParams params;
  DiscreteBath bath;
  bath.omegas = VectorXd::Constant(1, params.omega0);
  bath.couplings = VectorXd::Constant(1, 0.3);
  bath.masses = VectorXd::Ones(1);

  const oracle::ReferenceModes modes = oracle::reference_modes(bath, params);
  CHECK(modes.energies[0] == doctest::Approx(params.omega0 - 0.3).epsilon(1e-12));
  CHECK(modes.energies[1] == doctest::Approx(params.omega0 + 0.3).epsilon(1e-12));
  CHECK(residue_weight(bath, modes.energies[0]) == doctest::Approx(0.5).epsilon(1e-12));

  // Couplings strong enough to pull the lower level negative get reported.
  bath.couplings[0] = 1.2;
  const std::optional<double> e1 = find_bound_state(bath, params);
  REQUIRE(e1.has_value());
  CHECK(*e1 == doctest::Approx(params.omega0 - 1.2).epsilon(1e-12));
}

TEST_CASE("bound energy agrees with the direct eigensolve") {
  SystemParams params;
  const SpectralModel m = exp_model(2.0 * critical_coupling(exp_model(1.0), params));
  const PoleReport rep = classify_coupling(m, params);
  REQUIRE(rep.e1.has_value());

  // Midpoint sampling converges at a visible second-order rate.
  double previous = 1e30;
  for (int n : {128, 512, 2048}) {
    const DiscreteBath bath = discretize(m, n, 0.0, DiscretizationScheme::uniform_midpoint);
    const double err = std::abs(one_excitation_ground_energy(bath, params) - *rep.e1);
    CHECK(err < previous);
    previous = err;
  }

  // Gauss-Legendre nodes put the same energy at the rounding floor.
  const DiscreteBath gl = discretize(m, 512);
  CHECK(std::abs(one_excitation_ground_energy(gl, params) - *rep.e1) < 1e-10);
}

TEST_CASE("sweep report is internally consistent") {
  SystemParams params;
  const SpectralModel base = exp_model(1.0);
  const double eta_c = critical_coupling(base, params);
  // c0^2 grows with eta up to a maximum near 1.8 eta_c and then relaxes
  // toward the deep-binding value 1/2, so the monotone leg is the one
  // this sweep stays on; e1 keeps falling at any coupling.
  VectorXd etas = VectorXd::LinSpaced(9, 0.2 * eta_c, 1.5 * eta_c);

  const std::vector<PoleReport> rows = transition_report(base, params, etas);
  REQUIRE(rows.size() == 9);

  int flips = 0;
  double last_e1 = 0.0, last_c0sq = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].eta == doctest::Approx(etas[i]).epsilon(1e-14));
    CHECK(rows[i].eta_c == doctest::Approx(eta_c).epsilon(1e-12));
    if (i > 0 && rows[i].phase != rows[i - 1].phase) {
      ++flips;
      CHECK(rows[i - 1].eta < eta_c);
      CHECK(rows[i].eta > eta_c);
    }
    if (rows[i].phase == Phase::bound_state) {
      REQUIRE(rows[i].e1.has_value());
      REQUIRE(rows[i].c0sq.has_value());
      REQUIRE(rows[i].p0_inf.has_value());
      REQUIRE(rows[i].p1_inf.has_value());
      CHECK(*rows[i].p1_inf == doctest::Approx((*rows[i].c0sq) * (*rows[i].c0sq)).epsilon(1e-12));
      CHECK(*rows[i].p0_inf + *rows[i].p1_inf == doctest::Approx(1.0).epsilon(1e-12));
      if (last_e1 != 0.0) {
        CHECK(*rows[i].e1 < last_e1);        // deeper binding
        CHECK(*rows[i].c0sq > last_c0sq);    // more weight on the pole
      }
      last_e1 = *rows[i].e1;
      last_c0sq = *rows[i].c0sq;
    } else {
      CHECK(!rows[i].e1.has_value());
    }
  }
  CHECK(flips == 1);
}
