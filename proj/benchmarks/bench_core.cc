// Copyright 2026 The zodp Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Microbenchmarks for the hot paths: direction sampling, batched finite
// differences, and single optimizer steps.

#include <benchmark/benchmark.h>

#include <limits>

#include "zodp/estimator.h"
#include "zodp/optimizers.h"
#include "zodp/problems.h"
#include "zodp/rng.h"
#include "zodp/sampling.h"

namespace zodp {
namespace {

void BM_SampleSphere(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  RngStream rng(1);
  for (auto _ : state) {
    const Direction u = sample_sphere(d, rng);
    benchmark::DoNotOptimize(u.vec().data());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SampleSphere)->Arg(64)->Arg(1024);

void BM_GaussianVector(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  RngStream rng(1);
  for (auto _ : state) {
    const Vector z = sample_gaussian_vector(d, 1.0, rng);
    benchmark::DoNotOptimize(z.data());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_GaussianVector)->Arg(64)->Arg(1024);

void BM_BatchFiniteDifferences(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const Problem p = Problem::low_rank_logistic(d, 5, 2000, 7, 1.0, 1.0);
  RngStream rng(2);
  const Direction u = sample_sphere(d, rng);
  const Vector x = p.start_point();
  std::vector<double> fds;
  for (auto _ : state) {
    batch_finite_differences(p, x, u, 1e-4, fds);
    benchmark::DoNotOptimize(fds.data());
  }
  // Each batch is one two-point estimate per sample.
  state.SetItemsProcessed(state.iterations() * p.sample_count());
}
BENCHMARK(BM_BatchFiniteDifferences)->Arg(256)->Arg(1024);

void BM_StepDpZero(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const Problem p = Problem::low_rank_logistic(d, 5, 2000, 7, 1.0, 1.0);
  HyperParams hp;
  hp.algorithm = Algorithm::kDpZero;
  hp.alpha = 0.01;
  hp.lambda = 1e-4;
  hp.clip = 1.0;
  hp.sigma = 0.5;
  RngStream rng(3);
  const Vector x = p.start_point();
  for (auto _ : state) {
    const Direction u = sample_sphere(d, rng);
    const double noise = sample_gaussian_scalar(hp.sigma, rng);
    const StepResult step = step_dpzero(p, x, u, hp, noise);
    benchmark::DoNotOptimize(step.x_next.data());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_StepDpZero)->Arg(256)->Arg(1024);

void BM_StepAlg1(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const Problem p = Problem::low_rank_logistic(d, 5, 2000, 7, 1.0, 1.0);
  HyperParams hp;
  hp.algorithm = Algorithm::kAlg1;
  hp.alpha = 0.01;
  hp.lambda = 1e-4;
  hp.clip = static_cast<double>(d);
  hp.sigma = 0.5;
  RngStream rng(3);
  const Vector x = p.start_point();
  for (auto _ : state) {
    const Direction u = sample_sphere(d, rng);
    const Vector noise = sample_gaussian_vector(d, hp.sigma, rng);
    const StepResult step = step_alg1(p, x, u, hp, noise);
    benchmark::DoNotOptimize(step.x_next.data());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_StepAlg1)->Arg(256)->Arg(1024);

}  // namespace
}  // namespace zodp

BENCHMARK_MAIN();
