#include "lesskit/sketch.hpp"

#include <cmath>

#include "lesskit/parallel.hpp"
#include "lesskit/rng.hpp"

namespace lesskit {

namespace {

constexpr std::uint64_t kRowTag = 0x726F77ULL;    // per-sketch-row streams
constexpr std::uint64_t kSignTag = 0x7369676EULL;  // SRHT sign diagonal
constexpr std::uint64_t kPickTag = 0x7069636BULL;  // SRHT row subsample

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p *= 2;
  return p;
}

DenseMatrix apply_gaussian(std::size_t n, std::uint64_t seed, const DenseMatrix& m) {
  const std::size_t rows_in = m.rows();
  const std::size_t cols = m.cols();
  DenseMatrix out(n, cols);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  parallel_for(n, [&](std::size_t j) {
    SplitMix64 rng(derive_seed(seed, kRowTag, j));
    std::vector<double> g(rows_in);
    for (std::size_t i = 0; i < rows_in; ++i) g[i] = rng.next_normal();
    for (std::size_t c = 0; c < cols; ++c)
      out(j, c) = scale * dot(std::span<const double>(g), m.col(c));
  });
  return out;
}

DenseMatrix apply_sparse_signed(std::size_t n, std::size_t k, std::uint64_t seed,
                                const DenseMatrix& m, const AliasTable* table,
                                std::span<const double> probs) {
  const std::size_t rows_in = m.rows();
  const std::size_t cols = m.cols();
  DenseMatrix out(n, cols);
  const double row_scale = 1.0 / std::sqrt(static_cast<double>(n));
  const double uniform_p = 1.0 / static_cast<double>(rows_in);
  parallel_for(n, [&](std::size_t j) {
    SplitMix64 rng(derive_seed(seed, kRowTag, j));
    // ≤ k distinct (input row, coefficient) pairs; repeat draws coalesce.
    std::vector<std::pair<std::size_t, double>> entries;
    entries.reserve(k);
    for (std::size_t t = 0; t < k; ++t) {
      const std::size_t idx = table ? table->sample(rng)
                                    : static_cast<std::size_t>(rng.next_below(rows_in));
      const double p = table ? probs[idx] : uniform_p;
      const double coef = rng.next_rademacher() / std::sqrt(static_cast<double>(k) * p);
      bool merged = false;
      for (auto& [i, c] : entries) {
        if (i == idx) {
          c += coef;
          merged = true;
          break;
        }
      }
      if (!merged) entries.emplace_back(idx, coef);
    }
    for (std::size_t c = 0; c < cols; ++c) {
      auto col = m.col(c);
      double acc = 0.0;
      for (const auto& [idx, coef] : entries) acc += coef * col[idx];
      out(j, c) = row_scale * acc;
    }
  });
  return out;
}

DenseMatrix apply_uniform_rows(std::size_t n, std::uint64_t seed, const DenseMatrix& m) {
  const std::size_t rows_in = m.rows();
  const std::size_t cols = m.cols();
  DenseMatrix out(n, cols);
  const double scale = std::sqrt(static_cast<double>(rows_in) / static_cast<double>(n));
  parallel_for(n, [&](std::size_t j) {
    SplitMix64 rng(derive_seed(seed, kRowTag, j));
    const std::size_t idx = static_cast<std::size_t>(rng.next_below(rows_in));
    for (std::size_t c = 0; c < cols; ++c) out(j, c) = scale * m(idx, c);
  });
  return out;
}

}  // namespace

const char* family_name(SketchFamily family) {
  switch (family) {
    case SketchFamily::Gaussian: return "gaussian";
    case SketchFamily::Less: return "less";
    case SketchFamily::LessUniform: return "less-uniform";
    case SketchFamily::Srht: return "srht";
    case SketchFamily::UniformRows: return "uniform-rows";
  }
  return "?";
}

std::size_t resolved_nnz_per_row(const SketchSpec& spec, std::size_t d) {
  if (spec.dense_rows) {
    const double delta = 1e-3;
    const double nd = static_cast<double>(spec.n) * static_cast<double>(d);
    return static_cast<std::size_t>(
        std::ceil(static_cast<double>(d) * std::log(nd / delta)));
  }
  return spec.k ? spec.k : d;
}

namespace detail {

DenseMatrix srht_apply(const DenseMatrix& m, std::size_t n, std::uint64_t seed,
                       bool force_unit_signs) {
  const std::size_t rows_in = m.rows();
  const std::size_t cols = m.cols();
  const std::size_t padded = next_pow2(rows_in);
  if (n > padded)
    throw SketchTooLargeError("srht: sketch size exceeds padded row count");

  std::vector<double> signs(rows_in, 1.0);
  if (!force_unit_signs) {
    SplitMix64 sign_rng(derive_seed(seed, kSignTag));
    for (std::size_t i = 0; i < rows_in; ++i) signs[i] = sign_rng.next_rademacher();
  }

  // n of the padded rows, uniformly without replacement (partial Fisher-Yates).
  std::vector<std::size_t> picked(padded);
  for (std::size_t i = 0; i < padded; ++i) picked[i] = i;
  SplitMix64 pick_rng(derive_seed(seed, kPickTag));
  for (std::size_t t = 0; t < n; ++t) {
    const std::size_t swap_with =
        t + static_cast<std::size_t>(pick_rng.next_below(padded - t));
    std::swap(picked[t], picked[swap_with]);
  }

  // √(N′/n)/√N′ makes E[SᵀS] the identity on the padded space.
  const double scale = std::sqrt(static_cast<double>(padded) / static_cast<double>(n)) /
                       std::sqrt(static_cast<double>(padded));

  DenseMatrix out(n, cols);
  parallel_for(cols, [&](std::size_t c) {
    std::vector<double> buf(padded, 0.0);
    auto col = m.col(c);
    for (std::size_t i = 0; i < rows_in; ++i) buf[i] = signs[i] * col[i];
    fwht_inplace(std::span<double>(buf));
    for (std::size_t t = 0; t < n; ++t) out(t, c) = scale * buf[picked[t]];
  });
  return out;
}

}  // namespace detail

DenseMatrix sketch_apply(const SketchSpec& spec, const DenseMatrix& m,
                         const LeverageProfile* profile) {
  if (spec.n == 0) throw SketchTooSmallError("sketch_apply: zero sketch rows");
  switch (spec.family) {
    case SketchFamily::Gaussian:
      return apply_gaussian(spec.n, spec.seed, m);
    case SketchFamily::Less: {
      if (!profile)
        throw InvalidDistributionError("sketch_apply: leverage profile required");
      if (profile->probs.size() != m.rows())
        throw InvalidDistributionError("sketch_apply: profile does not match row count");
      const AliasTable table(profile->probs);
      return apply_sparse_signed(spec.n, resolved_nnz_per_row(spec, m.cols()), spec.seed,
                                 m, &table, profile->probs);
    }
    case SketchFamily::LessUniform:
      return apply_sparse_signed(spec.n, resolved_nnz_per_row(spec, m.cols()), spec.seed,
                                 m, nullptr, {});
    case SketchFamily::Srht:
      return detail::srht_apply(m, spec.n, spec.seed, false);
    case SketchFamily::UniformRows:
      return apply_uniform_rows(spec.n, spec.seed, m);
  }
  throw Error("sketch_apply: unknown family");
}

SketchedPair sketch_pair(const DenseMatrix& a, const DenseVector& b, const SketchSpec& spec,
                         const LeverageProfile* profile) {
  if (a.rows() != b.len())
    throw DimensionMismatchError("sketch_pair: a and b row counts differ");
  // One pass over [a | b]; the operator's randomness does not depend on the
  // column count, so this equals sketching a and b separately.
  DenseMatrix joint(a.rows(), a.cols() + 1);
  for (std::size_t j = 0; j < a.cols(); ++j) {
    auto src = a.col(j);
    auto dst = joint.col(j);
    for (std::size_t i = 0; i < a.rows(); ++i) dst[i] = src[i];
  }
  {
    auto dst = joint.col(a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) dst[i] = b[i];
  }
  DenseMatrix sketched = sketch_apply(spec, joint, profile);
  SketchedPair out;
  out.sa = DenseMatrix(spec.n, a.cols());
  for (std::size_t j = 0; j < a.cols(); ++j) {
    auto src = sketched.col(j);
    auto dst = out.sa.col(j);
    for (std::size_t i = 0; i < spec.n; ++i) dst[i] = src[i];
  }
  out.sb = sketched.col_copy(a.cols());
  return out;
}

SketchedPair sketch_gaussian(const DenseMatrix& a, const DenseVector& b, std::size_t n,
                             std::uint64_t seed) {
  return sketch_pair(a, b, {SketchFamily::Gaussian, n, 0, false, seed});
}

SketchedPair sketch_less(const DenseMatrix& a, const DenseVector& b, std::size_t n,
                         std::size_t k, const LeverageProfile& profile, std::uint64_t seed) {
  return sketch_pair(a, b, {SketchFamily::Less, n, k, false, seed}, &profile);
}

SketchedPair sketch_less_uniform(const DenseMatrix& a, const DenseVector& b, std::size_t n,
                                 std::size_t k, std::uint64_t seed) {
  return sketch_pair(a, b, {SketchFamily::LessUniform, n, k, false, seed});
}

SketchedPair sketch_srht(const DenseMatrix& a, const DenseVector& b, std::size_t n,
                         std::uint64_t seed) {
  return sketch_pair(a, b, {SketchFamily::Srht, n, 0, false, seed});
}

SketchedPair sketch_uniform_rows(const DenseMatrix& a, const DenseVector& b, std::size_t n,
                                 std::uint64_t seed) {
  return sketch_pair(a, b, {SketchFamily::UniformRows, n, 0, false, seed});
}

DenseMatrix sample_hard_example(double m, std::size_t d, std::size_t n_samples,
                                std::uint64_t seed) {
  if (!(m >= 1.0)) throw std::invalid_argument("sample_hard_example: need m >= 1");
  const double fire_p = 1.0 / (m * m);
  DenseMatrix out(n_samples, d);
  parallel_for(n_samples, [&](std::size_t i) {
    SplitMix64 rng(derive_seed(seed, kRowTag, i));
    for (std::size_t j = 0; j < d; ++j) {
      const bool fires = rng.next_unit() < fire_p;
      const double sign = rng.next_rademacher();
      out(i, j) = fires ? m * sign : 0.0;
    }
  });
  return out;
}

DenseVector gaussianized_sample(const DenseMatrix& x_rows, std::size_t k, std::uint64_t seed) {
  if (x_rows.rows() < k)
    throw DimensionMismatchError("gaussianized_sample: fewer rows than k");
  if (k == 0) throw std::invalid_argument("gaussianized_sample: k must be positive");
  SplitMix64 rng(seed);
  DenseVector acc(x_rows.cols());
  for (std::size_t i = 0; i < k; ++i) {
    const double sign = rng.next_rademacher();
    for (std::size_t j = 0; j < x_rows.cols(); ++j) acc[j] += sign * x_rows(i, j);
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(k));
  for (std::size_t j = 0; j < acc.len(); ++j) acc[j] *= scale;
  return acc;
}

}  // namespace lesskit
