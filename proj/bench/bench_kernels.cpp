#include <benchmark/benchmark.h>

#include "relaxctl/dynamics.hpp"
#include "relaxctl/unitary.hpp"

namespace {

using namespace relaxctl;

struct Fixture {
  ModelParams params;
  LiouvilleSpectrum spectrum;
  DensityMatrix rho0;
  Matrix rho_inf;
  std::vector<double> grid;

  explicit Fixture(int n_qubits) : rho0(DensityMatrix::all_down(n_qubits)) {
    params.n_qubits = n_qubits;
    spectrum = diagonalize(liouvillian(params));
    rho_inf = steady_state(spectrum).mat();
    grid = default_time_grid(spectrum);
  }
};

Fixture& fixture(int n_qubits) {
  static Fixture f3(3), f4(4);
  return n_qubits == 3 ? f3 : f4;
}

void BM_TrajectorySerial(benchmark::State& state) {
  Fixture& f = fixture(int(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(
        trajectory_distances_serial(f.spectrum, f.rho0.mat(), f.rho_inf, f.grid));
}
BENCHMARK(BM_TrajectorySerial)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_TrajectoryParallel(benchmark::State& state) {
  Fixture& f = fixture(int(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(
        trajectory_distances(f.spectrum, f.rho0.mat(), f.rho_inf, f.grid));
}
BENCHMARK(BM_TrajectoryParallel)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_RestrictedGridSerial(benchmark::State& state) {
  Fixture& f = fixture(int(state.range(0)));
  const DensityMatrix target(
      steady_state(f.spectrum).mat() * 0.0 +
      DensityMatrix::maximally_mixed(f.rho0.dim()).mat());
  for (auto _ : state)
    benchmark::DoNotOptimize(restricted_grid_serial(
        f.rho0, target, f.params.n_qubits, RestrictedObjective::Infidelity, 32));
}
BENCHMARK(BM_RestrictedGridSerial)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_RestrictedGridParallel(benchmark::State& state) {
  Fixture& f = fixture(int(state.range(0)));
  const DensityMatrix target(
      steady_state(f.spectrum).mat() * 0.0 +
      DensityMatrix::maximally_mixed(f.rho0.dim()).mat());
  for (auto _ : state)
    benchmark::DoNotOptimize(restricted_grid(
        f.rho0, target, f.params.n_qubits, RestrictedObjective::Infidelity, 32));
}
BENCHMARK(BM_RestrictedGridParallel)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
