#include <benchmark/benchmark.h>

#include "furrow/classical.hpp"
#include "furrow/matcher.hpp"
#include "furrow/scene.hpp"

using namespace furrow;

namespace {

const RenderedScene& frame() {
  static const RenderedScene r = render(camera_defaults(), random_scene(1));
  return r;
}

void BM_DetectFurrow(benchmark::State& state) {
  const DepthMap& depth = frame().depth;
  const DetectorConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(detect_furrow(depth, cfg));
}
BENCHMARK(BM_DetectFurrow)->Unit(benchmark::kMillisecond);

void BM_Render(benchmark::State& state) {
  const CameraModel cam = camera_defaults();
  const SceneSpec spec = random_scene(2);
  const CorruptionSpec corruption{0.01, 50, 8.0, {}, 3};
  for (auto _ : state) benchmark::DoNotOptimize(render(cam, spec, corruption));
}
BENCHMARK(BM_Render)->Unit(benchmark::kMillisecond);

void BM_OtsuCanny(benchmark::State& state) {
  const RgbImage& rgb = frame().rgb;
  for (auto _ : state) benchmark::DoNotOptimize(otsu_canny_pipeline(rgb));
}
BENCHMARK(BM_OtsuCanny)->Unit(benchmark::kMillisecond);

void BM_NccPatch(benchmark::State& state) {
  const auto size = static_cast<int>(state.range(0));
  const Template tmpl = make_step_template(size);
  DepthMap patch(size, size);
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x) patch.at(x, y) = 1.0 + 0.01 * y + (x >= size / 2 ? 0.2 : 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(ncc_score(patch, tmpl));
}
BENCHMARK(BM_NccPatch)->Arg(16)->Arg(30)->Arg(60);

}  // namespace

BENCHMARK_MAIN();
