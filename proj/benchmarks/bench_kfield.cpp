#include <benchmark/benchmark.h>

#include <cmath>

#include "kfield/connection.hpp"
#include "kfield/diagnostics.hpp"
#include "kfield/dynamics.hpp"
#include "kfield/wave.hpp"

using namespace kfield;
using namespace kfield::dyn;

namespace {

const Particle kUnit{1.0, 0.0};

geom::KMetricField wavy_metric() {
  return geom::make_analytic_metric(
      [](const Vec3& p, double t) { return 0.5 + 0.2 * std::sin(p.x + 0.3 * t); },
      [](const Vec3& p, double t) {
        return Vec3{0.2 * std::cos(p.x + 0.3 * t), 0.0, 0.0};
      },
      [](const Vec3& p, double t) { return 0.06 * std::cos(p.x + 0.3 * t); });
}

void BM_AssembleConnection(benchmark::State& state) {
  const auto m = wavy_metric();
  double t = 0.0;
  for (auto _ : state) {
    t += 1e-6;
    benchmark::DoNotOptimize(geom::assemble_connection(m, {0.2, 0.0, 0.0}, t));
  }
}
BENCHMARK(BM_AssembleConnection);

void BM_IntegrateOscillator(benchmark::State& state) {
  const auto pot = make_harmonic_potential(1.0);
  const State init{0.0, {0.5, 0, 0}, {0, 0, 0}};
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(integrate_newton(kUnit, pot, init, 1e-3, n, Scheme::Rk4, 1.0));
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_IntegrateOscillator)->Arg(1000)->Arg(10000);

void BM_GeodesicResidual(benchmark::State& state) {
  const auto pot = make_harmonic_potential(1.0);
  const State init{0.0, {0.5, 0, 0}, {0, 0, 0}};
  const auto traj = integrate_newton(kUnit, pot, init, 1e-3, 6284, Scheme::Rk4, 1.0);
  const auto metric = metric_from_energy(kUnit, pot, 0.125, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(geodesic_residual(traj, metric, kUnit, 0.0475));
  }
  state.SetItemsProcessed(state.iterations() * traj.steps());
}
BENCHMARK(BM_GeodesicResidual);

void BM_WaveOperator(benchmark::State& state) {
  wave::Grid1p1 grid;
  grid.nx = static_cast<int>(state.range(0));
  grid.nt = 32;
  grid.dx = 2.0 * M_PI / grid.nx;
  grid.dt = 0.5 * grid.dx * 0.5;
  const auto field = wave::sample_probe({1.0, 2.0, 1.0}, grid);
  for (auto _ : state) {
    benchmark::DoNotOptimize(wave::apply_k_dalembert(field, 0.25, grid));
  }
  state.SetItemsProcessed(state.iterations() * grid.size());
}
BENCHMARK(BM_WaveOperator)->Arg(128)->Arg(512);

}  // namespace

BENCHMARK_MAIN();
