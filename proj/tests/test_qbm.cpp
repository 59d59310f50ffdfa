#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "phase_engine/bath.hpp"
#include "phase_engine/dynamics.hpp"
#include "phase_engine/oracle.hpp"

using namespace phase_engine;

namespace {

// Stable position coupling needs eta < pi omega0 / (2 omega_c) for the
// ohmic exponential model; stay well inside.
DiscreteBath qbm_bath(int n, double eta, double temperature) {
  SpectralModel m;
  m.eta = eta;
  m.s = 1.0;
  m.omega_c = 2.0;
  m.cutoff = CutoffKind::exponential;
  return discretize(m, n, 0.0, DiscretizationScheme::gauss_legendre, temperature);
}

TimeGridSpec grid_spec(double t_max, int store_every) {
  TimeGridSpec g;
  g.t_max = t_max;
  g.dt = 0.0;  // default step for the discretized window
  g.store_every = store_every;
  return g;
}

}  // namespace

TEST_CASE("fundamental matrix starts from the identity") {
  SystemParams params;
  const DiscreteBath bath = qbm_bath(8, 0.3, 0.0);
  const PropagatorRecord rec = qbm_propagate(bath, params, grid_spec(1.0, 400));
  CHECK((rec.phi[0] - Mat2::Identity()).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(rec.noise[0].cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("canonical structure is preserved") {
  SystemParams params;
  const DiscreteBath bath = qbm_bath(16, 0.3, 0.0);
  const PropagatorRecord rec = qbm_propagate(bath, params, grid_spec(5.0, 1000), true);
  CHECK(rec.canonical_residual < 1e-6);

  // Same identity rebuilt from the stored blocks at the final time.
  Mat2 j;
  j << 0.0, 1.0, -1.0, 0.0;
  const int last = rec.n_stored() - 1;
  Mat2 total = rec.phi[last] * j * rec.phi[last].transpose();
  for (const Mat2& m : rec.mode_maps[last]) total += m * j * m.transpose();
  CHECK((total - j).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("covariance route matches exact normal modes") {
  SystemParams params;
  const CovarianceMatrix a0 = vacuum_covariance(params);
  for (double temperature : {0.0, 1.0}) {
    const DiscreteBath bath = qbm_bath(8, 0.3, temperature);
    const PropagatorRecord rec = qbm_propagate(bath, params, grid_spec(5.0, 2000));
    for (int k = 1; k < rec.n_stored(); ++k) {
      const Mat2 engine =
          rec.phi[k] * a0.matrix() * rec.phi[k].transpose() + rec.noise[k];
      const CovarianceMatrix exact =
          oracle::qbm_full_covariance(bath, params, a0, rec.times[k]);
      CHECK((engine - exact.matrix()).cwiseAbs().maxCoeff() < 1e-6);
    }
  }
}

TEST_CASE("noise kernel is symmetric and grows from zero") {
  SystemParams params;
  const DiscreteBath bath = qbm_bath(12, 0.3, 0.5);
  const PropagatorRecord rec = qbm_propagate(bath, params, grid_spec(4.0, 800));
  for (int k = 0; k < rec.n_stored(); ++k) {
    CHECK(std::abs(rec.noise[k](0, 1) - rec.noise[k](1, 0)) < 1e-12);
  }
  const int last = rec.n_stored() - 1;
  CHECK(rec.noise[last].trace() > 0.0);

  // sigma recomputed from the fine fundamental samples matches the stored one.
  const Mat2 redo = qbm_sigma(bath, params, rec.phi_fine, rec.dt, rec.times[last]);
  CHECK((redo - rec.noise[last]).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("vacuum stays above the uncertainty floor") {
  SystemParams params;
  const CovarianceMatrix a0 = vacuum_covariance(params);
  const DiscreteBath bath = qbm_bath(12, 0.3, 0.0);
  const PropagatorRecord rec = qbm_propagate(bath, params, grid_spec(5.0, 500));
  for (int k = 0; k < rec.n_stored(); ++k) {
    const Mat2 a = rec.phi[k] * a0.matrix() * rec.phi[k].transpose() + rec.noise[k];
    CHECK(a.determinant() >= 0.25 - 1e-9);
  }
}
