#pragma once

#include <cstdint>
#include <string>

#include "lesskit/leverage.hpp"
#include "lesskit/matrix.hpp"

namespace lesskit {

enum class SketchFamily { Gaussian, Less, LessUniform, Srht, UniformRows };

const char* family_name(SketchFamily family);

// Description of an n×N sketching operator. The operator itself is never
// materialized; (family, n, k, seed) fully determine its action, so applying
// the same spec to different N-row inputs uses the same random operator.
struct SketchSpec {
  SketchFamily family = SketchFamily::Gaussian;
  std::size_t n = 0;     // sketch rows
  std::size_t k = 0;     // nonzeros per row for the sparse families; 0 = "use d"
  bool dense_rows = false;  // sparse families: use ceil(d·log(n·d/δ)) nonzeros, δ = 1e-3
  std::uint64_t seed = 0;
};

// Nonzeros per row after resolving the defaults against the data dimension.
std::size_t resolved_nnz_per_row(const SketchSpec& spec, std::size_t d);

struct SketchedPair {
  DenseMatrix sa;  // n×d
  DenseVector sb;  // n
};

// Applies the sketching operator described by spec to an N-row matrix.
// The sparse leverage-based family requires a sampling profile for the same
// N rows. Randomness is indexed by (seed, sketch row), so rows are generated
// in parallel with output independent of the thread count.
DenseMatrix sketch_apply(const SketchSpec& spec, const DenseMatrix& m,
                         const LeverageProfile* profile = nullptr);

// Applies one operator draw to the pair (a, b) in a single pass.
SketchedPair sketch_pair(const DenseMatrix& a, const DenseVector& b, const SketchSpec& spec,
                         const LeverageProfile* profile = nullptr);

// Dense i.i.d. N(0, 1/n) embedding.
SketchedPair sketch_gaussian(const DenseMatrix& a, const DenseVector& b, std::size_t n,
                             std::uint64_t seed);

// Sparse embedding with k nonzeros per row placed by leverage-mixture
// sampling with replacement; each placement gets its own Rademacher sign and
// 1/√(k·p_i) importance weight, and the row carries the overall 1/√n scale.
SketchedPair sketch_less(const DenseMatrix& a, const DenseVector& b, std::size_t n,
                         std::size_t k, const LeverageProfile& profile, std::uint64_t seed);

// Same construction with uniform position sampling (no leverage preprocessing).
SketchedPair sketch_less_uniform(const DenseMatrix& a, const DenseVector& b, std::size_t n,
                                 std::size_t k, std::uint64_t seed);

// Random sign flip, Walsh–Hadamard mix (rows zero-padded to the next power of
// two N′), then n of N′ rows sampled without replacement, scaled so that
// E[SᵀS] = I on the padded space. Throws SketchTooLargeError when n > N′.
SketchedPair sketch_srht(const DenseMatrix& a, const DenseVector& b, std::size_t n,
                         std::uint64_t seed);

// n rows sampled i.i.d. uniformly with replacement, scaled by √(N/n).
SketchedPair sketch_uniform_rows(const DenseMatrix& a, const DenseVector& b, std::size_t n,
                                 std::uint64_t seed);

// Isotropic sparse test distribution: each coordinate is M·t·b with t a
// Rademacher sign and b ~ Bernoulli(1/M²). Larger m means sparser rows with
// heavier sub-gaussian norm. Requires m ≥ 1.
DenseMatrix sample_hard_example(double m, std::size_t d, std::size_t n_samples,
                                std::uint64_t seed);

// (1/√k) Σ r_i x_i over the first k rows with fresh Rademacher signs.
DenseVector gaussianized_sample(const DenseMatrix& x_rows, std::size_t k, std::uint64_t seed);

namespace detail {
// SRHT action on an N-row matrix; force_unit_signs pins the sign diagonal to
// +1 (test hook for checking the transform path in isolation).
DenseMatrix srht_apply(const DenseMatrix& m, std::size_t n, std::uint64_t seed,
                       bool force_unit_signs);
}  // namespace detail

}  // namespace lesskit
