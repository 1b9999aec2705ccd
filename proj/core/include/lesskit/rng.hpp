#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include "lesskit/errors.hpp"

namespace lesskit {

namespace detail {
// SplitMix64 output mixer (Steele/Lea/Flood splittable generator).
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}  // namespace detail

// Derives an independent stream seed from a master seed and up to three
// stream coordinates (operator index, grid index, trial index, sketch row,
// ...). Streams derived from distinct coordinates are decorrelated, which is
// what makes per-row and per-trial parallelism reproducible: results depend
// only on the coordinates, never on scheduling.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a = 0,
                                 std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t h = detail::mix64(master + detail::kGolden);
  h = detail::mix64(h ^ (a + detail::kGolden));
  h = detail::mix64(h ^ (b + detail::kGolden));
  h = detail::mix64(h ^ (c + detail::kGolden));
  return h;
}

// Deterministic splittable PRNG. The generator is self-contained (no
// dependence on libstdc++ distribution internals) so identical seeds give
// bit-identical streams on every platform and thread.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += detail::kGolden;
    return detail::mix64(state_);
  }

  // Uniform on [0, 1), 53-bit resolution.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1]; safe to feed into log().
  double next_unit_open() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  double next_rademacher() { return (next_u64() & 1ULL) ? 1.0 : -1.0; }

  // Uniform integer in [0, bound) via rejection-free 128-bit multiply.
  std::uint64_t next_below(std::uint64_t bound) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
  }

  // Standard normal via Box-Muller; second value of the pair is cached.
  double next_normal() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    const double u1 = next_unit_open();
    const double u2 = next_unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    cached_ = r * std::sin(t);
    has_cached_ = true;
    return r * std::cos(t);
  }

 private:
  std::uint64_t state_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

// Walker/Vose alias table for O(1) draws from a fixed discrete distribution.
// Construction is deterministic in the input order.
class AliasTable {
 public:
  explicit AliasTable(std::span<const double> probs) {
    const std::size_t n = probs.size();
    if (n == 0) throw InvalidDistributionError("alias table: empty distribution");
    double total = 0.0;
    for (double p : probs) {
      if (!(p >= 0.0) || !std::isfinite(p))
        throw InvalidDistributionError("alias table: negative or non-finite probability");
      total += p;
    }
    if (total <= 0.0) throw InvalidDistributionError("alias table: zero total mass");

    accept_.resize(n);
    alias_.resize(n);
    std::vector<double> scaled(n);
    std::vector<std::uint32_t> small, large;
    small.reserve(n);
    large.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      scaled[i] = probs[i] * static_cast<double>(n) / total;
      (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
    }
    while (!small.empty() && !large.empty()) {
      const std::uint32_t s = small.back();
      const std::uint32_t l = large.back();
      small.pop_back();
      accept_[s] = scaled[s];
      alias_[s] = l;
      scaled[l] -= 1.0 - scaled[s];
      if (scaled[l] < 1.0) {
        large.pop_back();
        small.push_back(l);
      }
    }
    for (std::uint32_t l : large) accept_[l] = 1.0;
    for (std::uint32_t s : small) accept_[s] = 1.0;  // numerical leftovers
  }

  std::size_t size() const { return accept_.size(); }

  std::size_t sample(SplitMix64& rng) const {
    const std::size_t slot = static_cast<std::size_t>(rng.next_below(accept_.size()));
    const double coin = rng.next_unit();
    return coin < accept_[slot] ? slot : alias_[slot];
  }

 private:
  std::vector<double> accept_;
  std::vector<std::uint32_t> alias_;
};

}  // namespace lesskit
