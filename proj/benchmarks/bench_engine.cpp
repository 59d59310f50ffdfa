#include <benchmark/benchmark.h>

#include "phase_engine/bath.hpp"
#include "phase_engine/dynamics.hpp"
#include "phase_engine/transition.hpp"
#include "phase_engine/wigner.hpp"

using namespace phase_engine;

namespace {

SpectralModel ohmic_supercritical() {
  SpectralModel m;
  m.eta = 1.2;
  m.s = 1.0;
  m.omega_c = 10.0;
  m.cutoff = CutoffKind::exponential;
  return m;
}

const SystemParams kParams{};

}  // namespace

static void BM_Discretize(benchmark::State& state) {
  const SpectralModel model = ohmic_supercritical();
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    DiscreteBath bath = discretize(model, n);
    benchmark::DoNotOptimize(bath.omegas.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Discretize)->RangeMultiplier(4)->Range(64, 4096)->Complexity();

static void BM_SelfEnergyContinuum(benchmark::State& state) {
  const SpectralModel model = ohmic_supercritical();
  double e = -0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(self_energy_real(model, e));
  }
}
BENCHMARK(BM_SelfEnergyContinuum);

static void BM_PoleSolve(benchmark::State& state) {
  const SpectralModel model = ohmic_supercritical();
  for (auto _ : state) {
    PoleReport report = classify_coupling(model, kParams);
    benchmark::DoNotOptimize(report.e1);
  }
}
BENCHMARK(BM_PoleSolve);

static void BM_OneExcitationSpectrum(benchmark::State& state) {
  const DiscreteBath bath = discretize(ohmic_supercritical(), static_cast<int>(state.range(0)));
  for (auto _ : state) {
    OneExcitationSpectrum spectrum = one_excitation_spectrum(bath, kParams);
    benchmark::DoNotOptimize(spectrum.energies.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_OneExcitationSpectrum)->RangeMultiplier(2)->Range(128, 1024)->Complexity();

static void BM_PropagatorDiag(benchmark::State& state) {
  const DiscreteBath bath = discretize(ohmic_supercritical(), static_cast<int>(state.range(0)));
  TimeGridSpec grid;
  grid.t_max = 50.0;
  grid.dt = 0.05;
  for (auto _ : state) {
    PropagatorRecord rec = make_resonant_record(bath, kParams, grid);
    benchmark::DoNotOptimize(rec.u.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_PropagatorDiag)->RangeMultiplier(2)->Range(128, 1024)->Complexity();

static void BM_PropagatorVolterra(benchmark::State& state) {
  const DiscreteBath bath = discretize(ohmic_supercritical(), 128);
  TimeGridSpec grid;
  grid.t_max = 20.0;
  grid.dt = 1.0 / static_cast<double>(state.range(0));
  for (auto _ : state) {
    PropagatorRecord rec =
        make_resonant_record(bath, kParams, grid, PropagatorMethod::volterra);
    benchmark::DoNotOptimize(rec.u.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_PropagatorVolterra)->RangeMultiplier(2)->Range(256, 1024)->Complexity();

static void BM_WignerRender(benchmark::State& state) {
  const DiscreteBath bath = discretize(ohmic_supercritical(), 128);
  TimeGridSpec grid;
  grid.t_max = 10.0;
  grid.dt = 0.05;
  const PropagatorRecord rec = make_resonant_record(bath, kParams, grid);
  const int n = static_cast<int>(state.range(0));
  const GridSpec spec{-5.0, 5.0, -5.0, 5.0, n, n};
  for (auto _ : state) {
    WignerGrid w = evolve_wigner(FockState{1}, rec, kParams, 10.0, spec);
    benchmark::DoNotOptimize(w.values.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_WignerRender)->RangeMultiplier(2)->Range(64, 256)->Complexity();

static void BM_CatWignerRender(benchmark::State& state) {
  const DiscreteBath bath = discretize(ohmic_supercritical(), 128);
  TimeGridSpec grid;
  grid.t_max = 10.0;
  grid.dt = 0.05;
  const PropagatorRecord rec = make_resonant_record(bath, kParams, grid);
  const int n = static_cast<int>(state.range(0));
  const GridSpec spec{-5.0, 5.0, -5.0, 5.0, n, n};
  const CatState cat{2.0, 0.0, +1};
  for (auto _ : state) {
    WignerGrid w = evolve_wigner(cat, rec, kParams, 10.0, spec);
    benchmark::DoNotOptimize(w.values.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_CatWignerRender)->RangeMultiplier(2)->Range(64, 256)->Complexity();

BENCHMARK_MAIN();
