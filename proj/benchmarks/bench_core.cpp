// Microbenchmarks for the evaluation hot paths at desk scale.

#include <benchmark/benchmark.h>

#include <random>

#include "pembed/affinity.hpp"
#include "pembed/objectives.hpp"
#include "pembed/optimizer.hpp"
#include "pembed/pressure.hpp"

namespace {

using namespace pembed;

Matrix random_points(Index n, Index dim, std::uint64_t seed, double scale) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-scale, scale);
  Matrix points(n, dim);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < dim; ++j) points(i, j) = u(rng);
  return points;
}

AffinityGraph bench_graph(Index n) {
  Dataset data;
  data.points = random_points(n, 3, 7, 5.0);
  AffinityConfig cfg;
  cfg.mode = AffinityConfig::Mode::FixedSigma;
  cfg.sigma = 2.0;
  cfg.lambda = 0.05;
  return build_affinities(data, cfg);
}

Method bench_method(int tag) {
  switch (tag) {
    case 0: return Method{MethodTag::EE};
    case 1: return Method{MethodTag::SNE};
    case 2: return Method{MethodTag::TSNE};
    default: return Method{MethodTag::UMAP, 1.2, 0.8};
  }
}

void BM_PairwiseSqdist(benchmark::State& state) {
  const Matrix points = random_points(state.range(0), 2, 11, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(pairwise_sqdist(points));
  }
}
BENCHMARK(BM_PairwiseSqdist)->Arg(128)->Arg(512);

void BM_ObjectiveValue(benchmark::State& state) {
  const AffinityGraph graph = bench_graph(state.range(1));
  const Embedding embedding{random_points(state.range(1), 2, 13, 1.0)};
  const Method method = bench_method(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(objective(method, graph, embedding));
  }
}
BENCHMARK(BM_ObjectiveValue)
    ->ArgsProduct({{0, 1, 2, 3}, {128, 512}});

void BM_ObjectiveGradient(benchmark::State& state) {
  const AffinityGraph graph = bench_graph(state.range(1));
  const Embedding embedding{random_points(state.range(1), 2, 13, 1.0)};
  const Method method = bench_method(static_cast<int>(state.range(0)));
  EvalOptions options;
  options.gradient = true;
  options.stats = true;
  for (auto _ : state) {
    benchmark::DoNotOptimize(evaluate(method, graph, embedding, options));
  }
}
BENCHMARK(BM_ObjectiveGradient)
    ->ArgsProduct({{0, 1, 2, 3}, {128, 512}});

void BM_PressureReportEE(benchmark::State& state) {
  const AffinityGraph graph = bench_graph(state.range(0));
  const Embedding embedding{random_points(state.range(0), 2, 17, 1.0)};
  for (auto _ : state) {
    benchmark::DoNotOptimize(compute_pressure(Method{MethodTag::EE}, graph, embedding));
  }
}
BENCHMARK(BM_PressureReportEE)->Arg(128)->Arg(512);

void BM_SpectralFactorization(benchmark::State& state) {
  const AffinityGraph graph = bench_graph(state.range(0));
  const Matrix l = graph_laplacian(graph);
  const double eps = 1e-10 * 4.0 * l.trace() / static_cast<double>(state.range(0));
  for (auto _ : state) {
    SpectralDirectionSolver solver(l, eps);
    benchmark::DoNotOptimize(solver.gradient_fallback());
  }
}
BENCHMARK(BM_SpectralFactorization)->Arg(128)->Arg(512);

void BM_SpectralSolve(benchmark::State& state) {
  const AffinityGraph graph = bench_graph(state.range(0));
  const Matrix l = graph_laplacian(graph);
  const double eps = 1e-10 * 4.0 * l.trace() / static_cast<double>(state.range(0));
  SpectralDirectionSolver solver(l, eps);
  const Matrix grad = random_points(state.range(0), 2, 19, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solver.solve_x(grad));
  }
}
BENCHMARK(BM_SpectralSolve)->Arg(128)->Arg(512);

void BM_PerplexityCalibration(benchmark::State& state) {
  Dataset data;
  data.points = random_points(state.range(0), 3, 23, 5.0);
  AffinityConfig cfg;
  cfg.mode = AffinityConfig::Mode::Perplexity;
  cfg.perplexity = 30.0;
  cfg.lambda = 1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_affinities(data, cfg));
  }
}
BENCHMARK(BM_PerplexityCalibration)->Arg(128)->Arg(512);

}  // namespace

BENCHMARK_MAIN();
