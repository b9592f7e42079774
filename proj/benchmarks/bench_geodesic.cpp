#include <benchmark/benchmark.h>

#include "fatpad/geodesic.hpp"
#include "fatpad/primitives.hpp"

using namespace fatpad;

static void BM_ExactGeodesic(benchmark::State& state) {
  const TriMesh sphere = make_icosphere(static_cast<int>(state.range(0)));
  const GeodesicSolver solver(sphere);
  for (auto _ : state) benchmark::DoNotOptimize(solver.solve_from(0).distances().data());
  state.counters["vertices"] = static_cast<double>(sphere.vertex_count());
}
BENCHMARK(BM_ExactGeodesic)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

static void BM_RefinedDijkstra(benchmark::State& state) {
  const TriMesh sphere = make_icosphere(3);
  const GeodesicSolver solver(sphere);
  const int refinement = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(solver.oracle_refined_dijkstra(0, refinement).distances().data());
}
BENCHMARK(BM_RefinedDijkstra)->Arg(2)->Arg(8)->Unit(benchmark::kMillisecond);
