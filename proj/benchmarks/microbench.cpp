#include <vector>

#include <benchmark/benchmark.h>

#include "polyx/bench.hpp"
#include "polyx/geom.hpp"
#include "polyx/lpfeas.hpp"
#include "polyx/minnorm.hpp"
#include "polyx/qp_baseline.hpp"

namespace {

constexpr int kInstances = 16;

std::vector<polyx::bench::Instance> instances(polyx::Index n, std::size_t k) {
  std::vector<polyx::bench::Instance> out;
  for (int i = 0; i < kInstances; ++i) out.push_back(polyx::bench::random_polyhedron(n, k, 1000 * k + i));
  return out;
}

polyx::Index dim_for(const benchmark::State& state) {
  return state.range(1) == 0 ? 3 : static_cast<polyx::Index>(state.range(0));
}

void BM_ExactSolve(benchmark::State& state) {
  const auto set = instances(dim_for(state), static_cast<std::size_t>(state.range(0)));
  polyx::minnorm::SolveOptions opts;
  opts.verify = false;
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& inst = set[i++ % set.size()];
    benchmark::DoNotOptimize(polyx::minnorm::solve(inst.polyhedron, inst.query, opts));
  }
}

void BM_AdmmSolve(benchmark::State& state) {
  const auto set = instances(dim_for(state), static_cast<std::size_t>(state.range(0)));
  std::vector<polyx::qp::QpProblem> problems;
  for (const auto& inst : set) problems.push_back(polyx::qp::QpProblem::centered(inst.polyhedron, inst.query));
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(polyx::qp::solve_approx(problems[i++ % problems.size()]));
  }
}

void BM_MinHDescription(benchmark::State& state) {
  const auto set = instances(3, static_cast<std::size_t>(state.range(0)));
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(polyx::geom::min_h_indices(set[i++ % set.size()].polyhedron));
  }
}

void BM_PreparedSignedDistance(benchmark::State& state) {
  const auto inst = polyx::bench::random_polyhedron(3, static_cast<std::size_t>(state.range(0)), 7);
  const polyx::minnorm::Solver solver(inst.polyhedron);
  for (auto _ : state) benchmark::DoNotOptimize(solver.signed_distance(inst.query));
}

// Second argument: 0 = fixed n = 3, 1 = n equals k.
void sizes(benchmark::internal::Benchmark* b) {
  for (int k : {1, 5, 10, 25, 50, 100}) b->Args({k, 0});
  for (int k : {2, 5, 10, 15, 20, 25}) b->Args({k, 1});
}

}  // namespace

BENCHMARK(BM_ExactSolve)->Apply(sizes)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_AdmmSolve)->Apply(sizes)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_MinHDescription)->Arg(10)->Arg(50)->Arg(100)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_PreparedSignedDistance)->Arg(10)->Arg(50)->Arg(100)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
