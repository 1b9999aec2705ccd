#include <benchmark/benchmark.h>

#include "lesskit/leverage.hpp"
#include "lesskit/rng.hpp"
#include "lesskit/sketch.hpp"

namespace {

lesskit::DenseMatrix random_matrix(std::size_t n, std::size_t d, std::uint64_t seed) {
  lesskit::SplitMix64 rng(seed);
  lesskit::DenseMatrix a(n, d);
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t i = 0; i < n; ++i) a(i, j) = rng.next_normal();
  return a;
}

void BM_SketchApply(benchmark::State& state, lesskit::SketchFamily family) {
  const std::size_t rows = static_cast<std::size_t>(state.range(0));
  const std::size_t d = 20;
  const std::size_t n = 10 * d;
  const lesskit::DenseMatrix a = random_matrix(rows, d, 1);
  const lesskit::LeverageProfile profile = lesskit::exact_leverage_scores(a);

  std::uint64_t seed = 0;
  for (auto _ : state) {
    lesskit::SketchSpec spec{family, n, 0, false, seed++};
    benchmark::DoNotOptimize(lesskit::sketch_apply(spec, a, &profile));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(rows));
}

}  // namespace

BENCHMARK_CAPTURE(BM_SketchApply, gaussian, lesskit::SketchFamily::Gaussian)
    ->Arg(2000)->Arg(20000);
BENCHMARK_CAPTURE(BM_SketchApply, less, lesskit::SketchFamily::Less)
    ->Arg(2000)->Arg(20000);
BENCHMARK_CAPTURE(BM_SketchApply, less_uniform, lesskit::SketchFamily::LessUniform)
    ->Arg(2000)->Arg(20000);
BENCHMARK_CAPTURE(BM_SketchApply, srht, lesskit::SketchFamily::Srht)
    ->Arg(2000)->Arg(20000);
BENCHMARK_CAPTURE(BM_SketchApply, uniform_rows, lesskit::SketchFamily::UniformRows)
    ->Arg(2000)->Arg(20000);

BENCHMARK_MAIN();
