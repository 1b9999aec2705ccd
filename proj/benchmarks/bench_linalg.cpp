#include <benchmark/benchmark.h>

#include "lesskit/linalg.hpp"
#include "lesskit/rng.hpp"

namespace {

lesskit::DenseMatrix random_matrix(std::size_t n, std::size_t d, std::uint64_t seed) {
  lesskit::SplitMix64 rng(seed);
  lesskit::DenseMatrix a(n, d);
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t i = 0; i < n; ++i) a(i, j) = rng.next_normal();
  return a;
}

void BM_ThinQR(benchmark::State& state) {
  const std::size_t rows = static_cast<std::size_t>(state.range(0));
  const std::size_t cols = static_cast<std::size_t>(state.range(1));
  const lesskit::DenseMatrix a = random_matrix(rows, cols, 7);
  for (auto _ : state) benchmark::DoNotOptimize(lesskit::qr_thin(a));
}

void BM_Fwht(benchmark::State& state) {
  const std::size_t len = static_cast<std::size_t>(state.range(0));
  lesskit::DenseVector x(len);
  lesskit::SplitMix64 rng(11);
  for (std::size_t i = 0; i < len; ++i) x[i] = rng.next_normal();
  for (auto _ : state) {
    lesskit::fwht_inplace(x);
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(len));
}

}  // namespace

BENCHMARK(BM_ThinQR)->Args({2000, 20})->Args({2000, 100})->Args({20000, 20});
BENCHMARK(BM_Fwht)->Arg(1 << 10)->Arg(1 << 14)->Arg(1 << 18);

BENCHMARK_MAIN();
