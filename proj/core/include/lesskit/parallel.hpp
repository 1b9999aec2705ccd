#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <span>
#include <thread>
#include <vector>

namespace lesskit {

namespace detail {
inline thread_local bool inside_parallel_region = false;
}

// Runs fn(i) for i in [0, count) on a bounded pool of worker threads.
// Work items must write only to their own output slots; with seeds derived
// from the item index the result is independent of the thread count.
// Nested calls (a parallel region inside a worker) run serially, so inner
// loops can use it unconditionally.
inline void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn,
                         unsigned max_threads = 0) {
  if (count == 0) return;
  unsigned hw = max_threads ? max_threads : std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(hw, count));
  if (workers <= 1 || detail::inside_parallel_region) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }

  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (count + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t begin = static_cast<std::size_t>(w) * chunk;
    const std::size_t end = std::min(count, begin + chunk);
    pool.emplace_back([&, w, begin, end] {
      detail::inside_parallel_region = true;
      try {
        for (std::size_t i = begin; i < end; ++i) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// Pairwise (cascade) summation: error grows like O(log n) instead of O(n),
// and the result is a pure function of the input order.
inline double pairwise_sum(std::span<const double> xs) {
  if (xs.size() <= 16) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.subspan(0, half)) + pairwise_sum(xs.subspan(half));
}

struct MeanStderr {
  double mean = 0.0;
  double stderr_of_mean = 0.0;
  bool variance_defined = false;
};

inline MeanStderr mean_and_stderr(std::span<const double> xs) {
  MeanStderr out;
  if (xs.empty()) return out;
  out.mean = pairwise_sum(xs) / static_cast<double>(xs.size());
  if (xs.size() < 2) return out;  // variance undefined, stderr stays 0
  std::vector<double> sq(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double d = xs[i] - out.mean;
    sq[i] = d * d;
  }
  const double var = pairwise_sum(sq) / static_cast<double>(xs.size() - 1);
  out.stderr_of_mean = std::sqrt(var / static_cast<double>(xs.size()));
  out.variance_defined = true;
  return out;
}

}  // namespace lesskit
