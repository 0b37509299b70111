#include <cmath>
#include <numbers>

#include <benchmark/benchmark.h>

#include "viscoctrl/kernel_engine.hpp"
#include "viscoctrl/modal_solver.hpp"
#include "viscoctrl/moment_control.hpp"
#include "viscoctrl/spectral_basis.hpp"

using namespace viscoctrl;

namespace {

const double kHorizon = 2.0 * std::numbers::pi + 0.3;

void BM_ResolventMarch(benchmark::State& state) {
  // Two terms, so the trapezoid march is the only path.
  const auto kernel = MemoryKernel::prony({{0.2, 1.0}, {0.1, 2.0}});
  const double h = kHorizon / static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(resolvent_kernel(kernel, h, kHorizon));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ResolventMarch)->RangeMultiplier(2)->Range(500, 4000)->Complexity(benchmark::oNSquared);

void BM_ModalSolve(benchmark::State& state) {
  const auto kernel = MemoryKernel::prony({{0.5, 1.0}});
  const auto grid = TimeGrid::uniform(kHorizon, static_cast<std::size_t>(state.range(0)));
  const auto scheme = state.range(1) == 0 ? Scheme::exponential_trapezoid : Scheme::velocity_verlet;
  for (auto _ : state) benchmark::DoNotOptimize(solve_modal_memory(5.0, kernel, 1.0, 0.0, {}, grid, scheme));
}
BENCHMARK(BM_ModalSolve)->ArgsProduct({{500, 1000, 2000}, {0, 1}});

void BM_MomentAssembly(benchmark::State& state) {
  const auto basis = interval_basis(static_cast<std::size_t>(state.range(0)), std::numbers::pi, Endpoint::left);
  const auto grid = TimeGrid::uniform(kHorizon, 2000);
  const auto kernel = MemoryKernel::prony({{0.5, 1.0}});
  const Eigen::MatrixXd profiles = Eigen::MatrixXd::Ones(1, 1);
  for (auto _ : state) benchmark::DoNotOptimize(build_viscoelastic_moment_matrix(basis, kernel, kHorizon, grid, profiles));
}
BENCHMARK(BM_MomentAssembly)->Arg(10)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_MinNormControl(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto basis = interval_basis(n, std::numbers::pi, Endpoint::left);
  const auto grid = TimeGrid::uniform(kHorizon, 2000);
  const auto mm = build_viscoelastic_moment_matrix(basis, MemoryKernel::prony({{0.5, 1.0}}), kHorizon, grid,
                                                   Eigen::MatrixXd::Ones(1, 1));
  const auto xi = CoeffState::unit(n, 0, Scale::L2);
  const auto eta = CoeffState::zero(n, Scale::Hm1);
  for (auto _ : state) benchmark::DoNotOptimize(min_norm_control(xi, eta, mm));
}
BENCHMARK(BM_MinNormControl)->Arg(10)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
