#include <doctest.h>

#include <cmath>

#include "lesskit/parallel.hpp"
#include "lesskit/sketch.hpp"
#include "lesskit/rng.hpp"

using namespace lesskit;

namespace {

DenseMatrix random_matrix(std::size_t n, std::size_t d, std::uint64_t seed) {
  SplitMix64 rng(seed);
  DenseMatrix a(n, d);
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t i = 0; i < n; ++i) a(i, j) = rng.next_normal();
  return a;
}

DenseVector random_vector(std::size_t n, std::uint64_t seed) {
  SplitMix64 rng(seed);
  DenseVector b(n);
  for (std::size_t i = 0; i < n; ++i) b[i] = rng.next_normal();
  return b;
}

LeverageProfile uniform_profile(std::size_t n) {
  LeverageProfile p;
  p.scores.assign(n, 0.0);
  p.probs.assign(n, 1.0 / static_cast<double>(n));
  p.exact = true;
  return p;
}

// E[n·SᵀS] = I estimated by stacking many sketch rows; checks the worst
// entrywise deviation.
double isotropy_deviation(SketchFamily family, std::size_t big_n, std::size_t input_rows,
                          std::size_t k, const LeverageProfile* profile,
                          std::uint64_t seed) {
  SketchSpec spec;
  spec.family = family;
  spec.n = big_n;
  spec.k = k;
  spec.seed = seed;
  const DenseMatrix s_of_identity =
      sketch_apply(spec, DenseMatrix::identity(input_rows), profile);
  const DenseMatrix sts = gram(s_of_identity);  // (SI)ᵀ(SI) = SᵀS, scaled by 1/n inside
  double worst = 0.0;
  for (std::size_t j = 0; j < input_rows; ++j)
    for (std::size_t i = 0; i < input_rows; ++i) {
      const double target = i == j ? 1.0 : 0.0;
      worst = std::max(worst, std::abs(sts(i, j) - target));
    }
  return worst;
}

}  // namespace

TEST_CASE("every family is deterministic in the seed") {
  const DenseMatrix a = random_matrix(32, 4, 1);
  const DenseVector b = random_vector(32, 2);
  const LeverageProfile profile = exact_leverage_scores(a);
  for (SketchFamily family :
       {SketchFamily::Gaussian, SketchFamily::Less, SketchFamily::LessUniform,
        SketchFamily::Srht, SketchFamily::UniformRows}) {
    SketchSpec spec;
    spec.family = family;
    spec.n = 16;
    spec.k = 4;
    spec.seed = 99;
    const SketchedPair p1 = sketch_pair(a, b, spec, &profile);
    const SketchedPair p2 = sketch_pair(a, b, spec, &profile);
    bool identical = true;
    for (std::size_t j = 0; j < p1.sa.cols() && identical; ++j)
      for (std::size_t i = 0; i < p1.sa.rows(); ++i)
        if (p1.sa(i, j) != p2.sa(i, j)) {
          identical = false;
          break;
        }
    for (std::size_t i = 0; i < p1.sb.len(); ++i)
      if (p1.sb[i] != p2.sb[i]) identical = false;
    CHECK_MESSAGE(identical, family_name(family));
  }
}

TEST_CASE("gaussian sketch: scalar case has unit variance across seeds") {
  const DenseMatrix a = DenseMatrix::identity(1);
  const DenseVector b{0.0};
  const std::size_t reps = 10000;
  std::vector<double> vals(reps);
  for (std::size_t s = 0; s < reps; ++s) vals[s] = sketch_gaussian(a, b, 1, s).sa(0, 0);
  double mean = 0.0, var = 0.0;
  for (double v : vals) mean += v;
  mean /= reps;
  for (double v : vals) var += (v - mean) * (v - mean);
  var /= reps - 1;
  CHECK(mean == doctest::Approx(0.0).epsilon(0.05));
  CHECK(var == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("gaussian sketch: E[n·‖S e1‖²] = 1 over seeds") {
  const std::size_t input_rows = 100, n = 50, reps = 10000;
  DenseMatrix e1(input_rows, 1);
  e1(0, 0) = 1.0;
  const DenseVector zero(input_rows);
  std::vector<double> vals(reps);
  parallel_for(reps, [&](std::size_t s) {
    SketchSpec spec{SketchFamily::Gaussian, n, 0, false, s};
    vals[s] = sketch_apply(spec, e1).col_copy(0).squared_norm();
  });
  const MeanStderr ms = mean_and_stderr(vals);
  CHECK(std::abs(ms.mean - 1.0) < 0.05);
  CHECK(std::abs(ms.mean - 1.0) < 4.0 * ms.stderr_of_mean + 0.01);
}

TEST_CASE("sparse families: single-row population gives ±1 coefficients") {
  const DenseMatrix a = DenseMatrix::from_rows({{2.0, -1.0}});
  const DenseVector b{3.0};
  const LeverageProfile profile = uniform_profile(1);
  const std::size_t n = 8;

  const SketchedPair less = sketch_less(a, b, n, 1, profile, 5);
  const SketchedPair lu = sketch_less_uniform(a, b, n, 1, 5);
  const double scale = std::sqrt(static_cast<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto* pair : {&less, &lu}) {
      const double c0 = pair->sa(i, 0) * scale / 2.0;
      CHECK(std::abs(std::abs(c0) - 1.0) < 1e-12);
      CHECK(pair->sa(i, 1) * scale / -1.0 == doctest::Approx(c0 * 1.0));
      CHECK(pair->sb[i] * scale / 3.0 == doctest::Approx(c0 * 1.0));
    }
  }
}

TEST_CASE("sparse families touch at most k input rows per sketch row") {
  const std::size_t input_rows = 20, k = 5, n = 40;
  const LeverageProfile profile = uniform_profile(input_rows);
  for (SketchFamily family : {SketchFamily::Less, SketchFamily::LessUniform}) {
    SketchSpec spec{family, n, k, false, 17};
    const DenseMatrix rows =
        sketch_apply(spec, DenseMatrix::identity(input_rows),
                     family == SketchFamily::Less ? &profile : nullptr);
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t nonzeros = 0;
      for (std::size_t j = 0; j < input_rows; ++j)
        if (rows(i, j) != 0.0) ++nonzeros;
      CHECK(nonzeros <= k);
      CHECK(nonzeros >= 1);
    }
  }
}

TEST_CASE("less isotropy: E[n·SᵀS] = I with uniform probabilities") {
  const LeverageProfile profile = uniform_profile(20);
  CHECK(isotropy_deviation(SketchFamily::Less, 20000, 20, 5, &profile, 3) < 0.05);
}

TEST_CASE("less-uniform isotropy") {
  CHECK(isotropy_deviation(SketchFamily::LessUniform, 20000, 20, 5, nullptr, 4) < 0.05);
}

TEST_CASE("uniform-rows isotropy") {
  // Diagonal entries are binomial row counts, std ≈ √(N/n) per entry.
  CHECK(isotropy_deviation(SketchFamily::UniformRows, 200000, 20, 0, nullptr, 6) < 0.05);
}

TEST_CASE("less isotropy under a leverage mixture") {
  const DenseMatrix a = random_matrix(30, 3, 12);
  const LeverageProfile profile = exact_leverage_scores(a);
  CHECK(isotropy_deviation(SketchFamily::Less, 40000, 30, 3, &profile, 8) < 0.05);
}

TEST_CASE("uniform-rows: single-row population") {
  const DenseMatrix a = DenseMatrix::from_rows({{1.5, -2.0}});
  const DenseVector b{1.0};
  const std::size_t n = 4;
  const SketchedPair pair = sketch_uniform_rows(a, b, n, 9);
  const double scale = std::sqrt(1.0 / static_cast<double>(n));
  double sts = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    CHECK(pair.sa(i, 0) == doctest::Approx(scale * 1.5));
    sts += pair.sa(i, 0) * pair.sa(i, 0);
  }
  CHECK(sts == doctest::Approx(1.5 * 1.5));  // n rows of 1/√n each
}

TEST_CASE("srht: full-size transform is an exact isometry") {
  const std::size_t input_rows = 16;
  const DenseMatrix a = random_matrix(input_rows, 3, 21);
  const DenseVector x = random_vector(3, 22);

  SUBCASE("forced unit signs isolate the transform path") {
    const DenseMatrix sa = detail::srht_apply(a, input_rows, 7, true);
    const DenseVector sax = matvec(sa, x);
    const DenseVector ax = matvec(a, x);
    CHECK(sax.norm() == doctest::Approx(ax.norm()).epsilon(1e-10));
  }
  SUBCASE("seeded signs") {
    const DenseMatrix sa = detail::srht_apply(a, input_rows, 7, false);
    const DenseVector sax = matvec(sa, x);
    const DenseVector ax = matvec(a, x);
    CHECK(sax.norm() == doctest::Approx(ax.norm()).epsilon(1e-10));
  }
}

TEST_CASE("srht: 2×2 output matches the hand-applied transform") {
  // With N = 2 the transform maps (a, b) to (s0·a + s1·b, s0·a − s1·b); the
  // sampled rows and sign pattern are read back from the operator's action on
  // the identity, then checked against a direct application to the data.
  const DenseMatrix a = DenseMatrix::from_rows({{1.0, 2.0}, {3.0, 5.0}});
  const std::uint64_t seed = 33;
  const DenseMatrix op = detail::srht_apply(DenseMatrix::identity(2), 2, seed, false);
  const DenseMatrix sa = detail::srht_apply(a, 2, seed, false);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      const double expect = op(i, 0) * a(0, j) + op(i, 1) * a(1, j);
      CHECK(sa(i, j) == doctest::Approx(expect).epsilon(1e-14));
    }
  // rows of √2·(HD) have entries ±1/√... : verify the operator is orthogonal
  const DenseMatrix g = gram(op);
  CHECK(g(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(g(1, 1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(g(0, 1) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("srht: norm preservation on average over seeds") {
  const std::size_t input_rows = 24;  // pads to 32
  const DenseMatrix a = random_matrix(input_rows, 4, 44);
  const DenseVector x = random_vector(4, 45);
  const double target = matvec(a, x).squared_norm();

  const std::size_t reps = 5000;
  std::vector<double> vals(reps);
  parallel_for(reps, [&](std::size_t s) {
    const DenseMatrix sa = detail::srht_apply(a, 8, s, false);
    vals[s] = matvec(sa, x).squared_norm();
  });
  const MeanStderr ms = mean_and_stderr(vals);
  CHECK(std::abs(ms.mean - target) <= 3.0 * ms.stderr_of_mean);
}

TEST_CASE("srht isotropy: E[SᵀS] = I entrywise on the padded space") {
  const std::size_t input_rows = 8, n = 4, reps = 4000;
  DenseMatrix accum(input_rows, input_rows);
  for (std::uint64_t s = 0; s < reps; ++s) {
    const DenseMatrix rows =
        detail::srht_apply(DenseMatrix::identity(input_rows), n, s, false);
    const DenseMatrix sts = gram(rows);
    for (std::size_t j = 0; j < input_rows; ++j)
      for (std::size_t i = 0; i < input_rows; ++i) accum(i, j) += sts(i, j) / reps;
  }
  for (std::size_t j = 0; j < input_rows; ++j)
    for (std::size_t i = 0; i < input_rows; ++i) {
      const double target = i == j ? 1.0 : 0.0;
      CHECK(std::abs(accum(i, j) - target) < 0.05);
    }
}

TEST_CASE("srht rejects oversized sketches") {
  const DenseMatrix a = random_matrix(8, 2, 50);
  const DenseVector b = random_vector(8, 51);
  CHECK_THROWS_AS(sketch_srht(a, b, 9, 1), SketchTooLargeError);
}

TEST_CASE("hard example: degenerate sparsity gives ±1 coordinates") {
  const DenseMatrix x = sample_hard_example(1.0, 4, 100, 60);
  for (double v : x.data()) CHECK(std::abs(v) == 1.0);
}

TEST_CASE("hard example: support is {0, ±M}") {
  const double m = 3.0;
  const DenseMatrix x = sample_hard_example(m, 4, 2000, 61);
  std::size_t nonzeros = 0;
  for (double v : x.data()) {
    const bool ok = v == 0.0 || std::abs(v) == m;
    CHECK(ok);
    if (v != 0.0) ++nonzeros;
  }
  // nonzero fraction = 1/M² ± 3 binomial stderr
  const double total = 4.0 * 2000.0;
  const double p = 1.0 / (m * m);
  const double se = std::sqrt(p * (1.0 - p) / total);
  CHECK(std::abs(static_cast<double>(nonzeros) / total - p) <= 3.0 * se + 1e-12);
}

TEST_CASE("hard example: empirical covariance approaches identity") {
  const std::size_t d = 4, samples = 100000;
  const DenseMatrix x = sample_hard_example(3.0, d, samples, 62);
  DenseMatrix cov = gram(x);
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t i = 0; i < d; ++i) {
      cov(i, j) /= static_cast<double>(samples);
      const double target = i == j ? 1.0 : 0.0;
      CHECK(std::abs(cov(i, j) - target) < 0.05);
    }
}

TEST_CASE("gaussianized sample: single term is a signed row") {
  const DenseMatrix rows = DenseMatrix::from_rows({{1.0, -2.0, 0.5}});
  const DenseVector g = gaussianized_sample(rows, 1, 3);
  const double sign = g[0] / 1.0;
  CHECK(std::abs(sign) == doctest::Approx(1.0));
  CHECK(g[1] == doctest::Approx(sign * -2.0));
  CHECK(g[2] == doctest::Approx(sign * 0.5));
}

TEST_CASE("gaussianized sample: collinear rows average to zero mean") {
  DenseMatrix rows(16, 2);
  for (std::size_t i = 0; i < 16; ++i) {
    rows(i, 0) = 1.0;
    rows(i, 1) = -1.0;
  }
  double mean0 = 0.0;
  for (std::uint64_t s = 0; s < 4000; ++s) mean0 += gaussianized_sample(rows, 16, s)[0];
  mean0 /= 4000.0;
  CHECK(std::abs(mean0) < 0.05);
}

TEST_CASE("gaussianized sample covariance matches (1/k)Σ x xᵀ") {
  const std::size_t k = 6, d = 3;
  const DenseMatrix rows = random_matrix(k, d, 70);
  DenseMatrix target(d, d);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t r = 0; r < d; ++r)
      for (std::size_t c = 0; c < d; ++c) target(r, c) += rows(i, r) * rows(i, c) / k;

  const std::size_t reps = 50000;
  std::vector<DenseVector> draws(reps, DenseVector(d));
  parallel_for(reps, [&](std::size_t s) { draws[s] = gaussianized_sample(rows, k, s); });
  DenseMatrix cov(d, d);
  for (const auto& z : draws)
    for (std::size_t r = 0; r < d; ++r)
      for (std::size_t c = 0; c < d; ++c) cov(r, c) += z[r] * z[c] / reps;

  const double scale = frobenius_norm(target);
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = 0; c < d; ++c)
      CHECK(std::abs(cov(r, c) - target(r, c)) < 0.05 * scale);
}

TEST_CASE("dense-rows policy resolves the documented nonzero count") {
  SketchSpec spec;
  spec.family = SketchFamily::LessUniform;
  spec.n = 100;
  spec.dense_rows = true;
  const std::size_t d = 10;
  const std::size_t expect =
      static_cast<std::size_t>(std::ceil(10.0 * std::log(100.0 * 10.0 / 1e-3)));
  CHECK(resolved_nnz_per_row(spec, d) == expect);
  spec.dense_rows = false;
  CHECK(resolved_nnz_per_row(spec, d) == d);
  spec.k = 7;
  CHECK(resolved_nnz_per_row(spec, d) == 7);
}
