// Microbenchmarks for the hot paths: the per-iteration algorithm steps, the
// stochastic oracles feeding them, the counter-based generator underneath,
// and the one-off spectral factorization cost.

#include <cstdint>
#include <vector>

#include <Eigen/Dense>
#include <benchmark/benchmark.h>

#include "edas/algorithms.hpp"
#include "edas/graph.hpp"
#include "edas/mixing.hpp"
#include "edas/problems.hpp"
#include "edas/rng.hpp"

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

void BM_PhiloxGaussian(benchmark::State& state) {
  edas::RngStream stream(1, edas::rng_domain::kProbe, 0, 0, 0);
  double sink = 0.0;
  for (auto _ : state) {
    for (int i = 0; i < 1024; ++i) sink += stream.next_gaussian();
  }
  benchmark::DoNotOptimize(sink);
  state.SetItemsProcessed(state.iterations() * 1024);
}
BENCHMARK(BM_PhiloxGaussian);

void BM_QuadraticOracle(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const edas::SpectralMixing spec =
      edas::spectral(edas::lazy_metropolis(edas::ring(n)));
  const edas::ProblemInstance problem = edas::quadratic_problem(spec, 1, 0.1);
  edas::RngStream stream(1, edas::rng_domain::kProbe, 0, 0, 0);
  const VectorXd x = VectorXd::Zero(problem.dim());
  VectorXd g(problem.dim());
  for (auto _ : state) {
    problem.stochastic_gradient_into(0, x, stream, g);
    benchmark::DoNotOptimize(g.data());
  }
}
BENCHMARK(BM_QuadraticOracle)->Arg(8)->Arg(32);

void BM_LogisticOracle(benchmark::State& state) {
  const edas::ProblemInstance problem = edas::logistic_problem(
      edas::synthetic_logistic_data(4, 100, 10, 7), 1.0,
      static_cast<int>(state.range(0)));
  edas::RngStream stream(1, edas::rng_domain::kProbe, 0, 0, 0);
  const VectorXd x = VectorXd::Zero(problem.dim());
  VectorXd g(problem.dim());
  for (auto _ : state) {
    problem.stochastic_gradient_into(0, x, stream, g);
    benchmark::DoNotOptimize(g.data());
  }
}
BENCHMARK(BM_LogisticOracle)->Arg(1)->Arg(16);

void BM_EdasStep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const edas::SpectralMixing spec =
      edas::spectral(edas::lazy_metropolis(edas::ring(n)));
  edas::EdasState iterate(MatrixXd::Zero(n, 1));
  const MatrixXd g = MatrixXd::Constant(n, 1, 0.25);
  for (auto _ : state) {
    edas::edas_step(iterate, spec, g, 0.01);
    benchmark::DoNotOptimize(iterate.x.data());
  }
}
BENCHMARK(BM_EdasStep)->Arg(8)->Arg(32)->Arg(128);

void BM_DsgtStep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const edas::SpectralMixing spec =
      edas::spectral(edas::lazy_metropolis(edas::ring(n)));
  const MatrixXd g0 = MatrixXd::Constant(n, 1, 0.25);
  edas::DsgtState iterate(MatrixXd::Zero(n, 1), g0);
  for (auto _ : state) {
    const MatrixXd proposal = edas::dsgt_propose(iterate, spec.w, 0.01);
    edas::dsgt_commit(iterate, spec.w, proposal, g0);
    benchmark::DoNotOptimize(iterate.x.data());
  }
}
BENCHMARK(BM_DsgtStep)->Arg(8)->Arg(32);

void BM_SpectralFactorization(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const MatrixXd w = edas::lazy_metropolis(edas::ring(n));
  for (auto _ : state) {
    const edas::SpectralMixing spec = edas::spectral(w);
    benchmark::DoNotOptimize(spec.v.data());
  }
}
BENCHMARK(BM_SpectralFactorization)->Arg(16)->Arg(64);

}  // namespace

BENCHMARK_MAIN();
