#include <benchmark/benchmark.h>
#include <omp.h>

#include "night/render.hpp"
#include "night/scene.hpp"

using namespace night;

namespace {

render::RenderConfig bench_config() {
  render::RenderConfig cfg;
  cfg.width = 32;
  cfg.height = 24;
  cfg.wall_patches_u = 16;
  cfg.wall_patches_v = 8;
  cfg.object_samples = 64;
  return cfg;
}

void BM_RenderReference(benchmark::State& state) {
  const SceneDescription scene = sample_scene(1);
  const render::RenderConfig cfg = bench_config();
  for (auto _ : state) benchmark::DoNotOptimize(render::reference::render_transient_nlos(scene, cfg));
}

void BM_RenderParallel(benchmark::State& state) {
  const SceneDescription scene = sample_scene(1);
  const render::RenderConfig cfg = bench_config();
  omp_set_num_threads(int(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(render::render_transient_nlos(scene, cfg));
  state.counters["threads"] = double(state.range(0));
}

void BM_RenderItof(benchmark::State& state) {
  const SceneDescription scene = sample_scene(1);
  render::RenderConfig cfg = bench_config();
  cfg.width = 64;
  cfg.height = 48;
  omp_set_num_threads(int(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(render::render_itof_nlos(scene, cfg, tof::kDefaultFrequenciesHz));
}

}  // namespace

BENCHMARK(BM_RenderReference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RenderParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RenderItof)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
