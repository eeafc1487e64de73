#include <benchmark/benchmark.h>

#include <vector>

#include "twophase/annulus.hpp"
#include "twophase/branch.hpp"
#include "twophase/ck.hpp"
#include "twophase/harmonics.hpp"
#include "twophase/identities.hpp"
#include "twophase/linearization.hpp"

namespace {

using namespace twophase;

void BM_Quadrature(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_quadrature(2, n));
  }
}
BENCHMARK(BM_Quadrature)->Arg(64)->Arg(256);

void BM_FrechetMatrix(benchmark::State& state) {
  double r = 0.3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(frechet_matrix(2, 2.0, r, 2));
    r += 1e-9;  // defeat value caching across iterations
  }
}
BENCHMARK(BM_FrechetMatrix);

void BM_CriticalRadius(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(critical_radius(2, static_cast<int>(state.range(0))));
  }
}
BENCHMARK(BM_CriticalRadius)->Arg(2)->Arg(8);

void BM_AnnulusSolve(benchmark::State& state) {
  const int K = static_cast<int>(state.range(0));
  PerturbedAnnulus domain = PerturbedAnnulus::trivial(2, critical_radius(2, 2), K);
  domain.eta[2] = 0.01;
  SolverOptions opts;
  opts.solver_truncation = K + 4;
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_dirichlet(domain, 2.0, opts));
  }
}
BENCHMARK(BM_AnnulusSolve)->Arg(8)->Arg(16);

void BM_NewtonStep(benchmark::State& state) {
  const PerturbedAnnulus start = PerturbedAnnulus::trivial(2, critical_radius(2, 2), 12);
  for (auto _ : state) {
    benchmark::DoNotOptimize(newton_solve(start, 2.0, 2, 5e-3));
  }
}
BENCHMARK(BM_NewtonStep)->Unit(benchmark::kMillisecond);

void BM_LevelRadius(benchmark::State& state) {
  const CKSolution sol = exterior_cauchy_solution(2, 2.0, 1.0, 0.1);
  double th = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(level_radius(sol, 1.0, th, 2.0));
    th += 1e-3;
  }
}
BENCHMARK(BM_LevelRadius);

void BM_BuildCounterexample(benchmark::State& state) {
  CKConfig cfg;
  cfg.dim = 2;
  cfg.epsilon = 0.1;
  cfg.gamma = 1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_counterexample(cfg, static_cast<int>(state.range(0))));
  }
}
BENCHMARK(BM_BuildCounterexample)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_DeficitIntegral(benchmark::State& state) {
  const CKSolution sol = exterior_cauchy_solution(2, 2.0, 1.0, 0.1);
  const TwoPhaseFrame frame = translate_to_identity_frame(sol, 1.0, 2.0, 64, 256);
  for (auto _ : state) {
    benchmark::DoNotOptimize(verify_identity(frame, 0.0, 16));
  }
}
BENCHMARK(BM_DeficitIntegral)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
