#include <benchmark/benchmark.h>

#include <filesystem>

#include "typeprobe/answer_parser.hpp"
#include "typeprobe/font_registry.hpp"
#include "typeprobe/metrics.hpp"
#include "typeprobe/oracle.hpp"
#include "typeprobe/perturb.hpp"
#include "typeprobe/raster.hpp"
#include "typeprobe/render.hpp"

using namespace typeprobe;

namespace {

const FontRegistry& registry() {
  static const FontRegistry r =
      load_registry_file(std::filesystem::path(TYPEPROBE_BENCH_DATA_DIR) / "registry.json");
  return r;
}

RenderSpec spec(int size_pt) {
  RenderSpec s;
  s.text = "The quick brown fox jumps over the lazy dog";
  s.font_id = registry().entries().front().id;
  s.size_pt = size_pt;
  return s;
}

void BM_RenderSample(benchmark::State& state) {
  const RenderSpec s = spec(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(render_sample(s, registry()));
}
BENCHMARK(BM_RenderSample)->Arg(12)->Arg(24)->Arg(64);

void BM_PngRoundTrip(benchmark::State& state) {
  const RasterImage img = render_sample(spec(24), registry());
  for (auto _ : state) benchmark::DoNotOptimize(decode_png(encode_png(img)));
}
BENCHMARK(BM_PngRoundTrip);

void BM_Perturb(benchmark::State& state, const char* name) {
  const RasterImage img = render_sample(spec(24), registry());
  const PerturbationSpec p = preset(name);
  for (auto _ : state) benchmark::DoNotOptimize(apply(img, p));
}
BENCHMARK_CAPTURE(BM_Perturb, noise_10, "noise-10");
BENCHMARK_CAPTURE(BM_Perturb, blur_4, "blur-4");
BENCHMARK_CAPTURE(BM_Perturb, jpeg_10, "jpeg-10");
BENCHMARK_CAPTURE(BM_Perturb, rot_45, "rot-45");
BENCHMARK_CAPTURE(BM_Perturb, scale_2, "scale-2");

void BM_ClassifyColor(benchmark::State& state) {
  const RasterImage img = render_sample(spec(24), registry());
  const RgbColor bg = estimate_background(img);
  for (auto _ : state) benchmark::DoNotOptimize(classify_color(img, bg));
}
BENCHMARK(BM_ClassifyColor);

void BM_ParseAnswer(benchmark::State& state) {
  const std::vector<std::string> options{"Arial", "Helvetica", "Helvetica Neue", "Futura"};
  for (auto _ : state) {
    benchmark::DoNotOptimize(parse_answer("The text is rendered in Helvetica Neue, I think.", options));
  }
}
BENCHMARK(BM_ParseAnswer);

void BM_Wilson(benchmark::State& state) {
  std::size_t k = 0;
  for (auto _ : state) benchmark::DoNotOptimize(wilson_interval(k++ % 1001, 1000));
}
BENCHMARK(BM_Wilson);

}  // namespace

BENCHMARK_MAIN();
