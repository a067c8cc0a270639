#include <benchmark/benchmark.h>

#include "turbid/infogain.hpp"
#include "turbid/planner.hpp"
#include "turbid/scene.hpp"

using namespace turbid;

namespace {

const Scene& hills() {
  static const Scene s = build_scene(hills_scene());
  return s;
}

JointView first_view() {
  const Scene& s = hills();
  return rig_view(*s.world.surface, s.config.waypoints[3], {0.12, 0, 0}, 1);
}

void BM_Project(benchmark::State& state) {
  const Scene& s = hills();
  const JointView v = first_view();
  for (auto _ : state) {
    benchmark::DoNotOptimize(project(*s.world.surface, v.camera, s.world.optics.camera));
  }
}
BENCHMARK(BM_Project)->Unit(benchmark::kMillisecond);

void BM_Render(benchmark::State& state) {
  const Scene& s = hills();
  const JointView v = first_view();
  for (auto _ : state) benchmark::DoNotOptimize(render(*s.world.surface, s.world.optics, v, 1));
}
BENCHMARK(BM_Render)->Unit(benchmark::kMillisecond);

void BM_ViewGain(benchmark::State& state) {
  const Scene& s = hills();
  const TextureMap texture = s.world.blank_texture();
  const JointView v = first_view();
  for (auto _ : state) benchmark::DoNotOptimize(view_gain(s.world, texture, v).total);
}
BENCHMARK(BM_ViewGain)->Unit(benchmark::kMillisecond);

void BM_NextBestView(benchmark::State& state) {
  const Scene& s = hills();
  const TextureMap texture = s.world.blank_texture();
  const CandidateSet set = generate_candidates(s.config.waypoints[3], s.config.planner.candidates, 1);
  for (auto _ : state) benchmark::DoNotOptimize(next_best_view(s.world, texture, set).index);
  state.counters["candidates"] = static_cast<double>(set.size());
}
BENCHMARK(BM_NextBestView)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
