#include <benchmark/benchmark.h>

#include <random>

#include "fatpad/bundle.hpp"
#include "fatpad/demo_head.hpp"
#include "fatpad/green_coords.hpp"
#include "fatpad/posing.hpp"
#include "fatpad/primitives.hpp"

using namespace fatpad;

namespace {

Cage sphere_cage(int rings, int segments) {
  const TriMesh m = make_uv_sphere(rings, segments, 1.0);
  Cage c;
  c.vertices = m.positions();
  c.triangles = m.triangles();
  return c;
}

std::shared_ptr<const Rig> demo_rig() {
  static const std::shared_ptr<const Rig> rig = [] {
    const TriMesh head = make_demo_head();
    return std::make_shared<const Rig>(build_rig(head, make_demo_map(head)));
  }();
  return rig;
}

}  // namespace

// 10242 interior points against a 62-vertex cage.
static void BM_Bind(benchmark::State& state) {
  const TriMesh inner = make_icosphere(5, 0.8);
  const Cage cage = sphere_cage(7, 10);
  for (auto _ : state) benchmark::DoNotOptimize(bind(inner, cage).phi.data());
}
BENCHMARK(BM_Bind)->Unit(benchmark::kMillisecond);

static void BM_Evaluate(benchmark::State& state) {
  const TriMesh inner = make_icosphere(5, 0.8);
  const Cage cage = sphere_cage(7, 10);
  const GCBinding b = bind(inner, cage);
  std::vector<Vec3> deformed = cage.vertices;
  deformed[3] += Vec3(0.05, 0.02, 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(b, deformed).data());
}
BENCHMARK(BM_Evaluate)->Unit(benchmark::kMillisecond);

static void BM_MoveHandleDemoHead(benchmark::State& state) {
  const auto rig = demo_rig();
  PoseState s(rig);
  const HandleId& h = rig->map.handles().front().id;
  const Vec3 rest = s.handle_position(h);
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> u(-0.02, 0.02);
  for (auto _ : state) {
    benchmark::DoNotOptimize(s.move_handle(h, rest + Vec3(u(rng), u(rng), u(rng))).data());
  }
}
BENCHMARK(BM_MoveHandleDemoHead)->Unit(benchmark::kMicrosecond);
