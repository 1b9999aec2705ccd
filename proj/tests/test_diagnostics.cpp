#include <doctest.h>

#include <cmath>

#include "lesskit/diagnostics.hpp"
#include "lesskit/parallel.hpp"
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

double quantile_at(const TailReport& r, double level, bool reference) {
  for (const auto& [l, v] : reference ? r.reference_quantiles : r.quantiles)
    if (l == level) return v;
  REQUIRE(false);
  return 0.0;
}

}  // namespace

TEST_CASE("hanson_wright_stat direct evaluations") {
  const DenseVector z{1.0, -2.0, 0.5};
  CHECK(hanson_wright_stat(z, DenseMatrix(3, 3)) == 0.0);

  DenseVector e1(4);
  e1[0] = 1.0;
  CHECK(hanson_wright_stat(e1, DenseMatrix::identity(4)) == doctest::Approx(3.0));

  DenseVector wrong(3);
  CHECK_THROWS_AS(hanson_wright_stat(wrong, DenseMatrix::identity(4)),
                  DimensionMismatchError);
}

TEST_CASE("hanson_wright_stat depends only on the symmetric part, exactly") {
  SplitMix64 rng(3);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t d = 2 + rng.next_below(6);
    DenseMatrix b(d, d);
    DenseVector z(d);
    for (std::size_t j = 0; j < d; ++j) {
      z[j] = rng.next_normal();
      for (std::size_t i = 0; i < d; ++i) b(i, j) = rng.next_normal();
    }
    DenseMatrix sym(d, d);
    for (std::size_t j = 0; j < d; ++j)
      for (std::size_t i = 0; i < d; ++i) sym(i, j) = (b(i, j) + b(j, i)) / 2.0;
    CHECK(hanson_wright_stat(z, b) == hanson_wright_stat(z, sym));
  }
}

TEST_CASE("hanson_wright_stat of gaussian rows matches the chi-square tail") {
  // With two degrees of freedom the squared norm is Exp(1/2), so the 0.99
  // quantile of |X - 2| is the t >= 2 solving 1 - exp(-(2+t)/2) = 0.99,
  // i.e. t = 2·ln(100) - 2.
  const double closed_form = 2.0 * std::log(100.0) - 2.0;
  const std::size_t trials = 100000;
  std::vector<double> stats(trials);
  const DenseMatrix eye = DenseMatrix::identity(2);
  parallel_for(trials, [&](std::size_t t) {
    SplitMix64 rng(derive_seed(11, t));
    DenseVector z(2);
    z[0] = rng.next_normal();
    z[1] = rng.next_normal();
    stats[t] = hanson_wright_stat(z, eye);
  });
  std::sort(stats.begin(), stats.end());
  const double q99 = stats[static_cast<std::size_t>(std::ceil(0.99 * trials)) - 1];
  CHECK(q99 == doctest::Approx(closed_form).epsilon(0.10));
}

TEST_CASE("hw_tail_compare: gaussian rows are self-consistent") {
  const std::size_t d = 8;
  const DenseMatrix eye = DenseMatrix::identity(d);
  const auto sampler = [&](std::uint64_t s) {
    SplitMix64 rng(s);
    DenseVector z(d);
    for (std::size_t i = 0; i < d; ++i) z[i] = rng.next_normal();
    return z;
  };
  const TailReport r = hw_tail_compare(sampler, eye, eye, 40000, 17);
  CHECK(r.trials == 40000);
  for (double level : {0.5, 0.9, 0.99}) {
    const double ours = quantile_at(r, level, false);
    const double base = quantile_at(r, level, true);
    CHECK(ours == doctest::Approx(base).epsilon(0.08));
  }
}

TEST_CASE("hw_tail_compare: whitened sparse leverage rows stay near-gaussian") {
  const std::size_t d = 16, n_rows = 1024;
  const DenseMatrix a = random_matrix(n_rows, d, 23);
  const LeverageProfile profile = exact_leverage_scores(a);
  const DenseMatrix whitener = symmetric_inverse_sqrt(gram(a));

  const auto sampler = [&](std::uint64_t s) {
    SketchSpec spec{SketchFamily::Less, 1, 0, false, s};
    return sketch_apply(spec, a, &profile).row_copy(0);
  };
  const TailReport r =
      hw_tail_compare(sampler, whitener, DenseMatrix::identity(d), 20000, 29);
  CHECK(quantile_at(r, 0.99, false) <= 2.0 * quantile_at(r, 0.99, true));
}

TEST_CASE("hw_tail_compare: unaveraged sparse heavy rows blow past gaussian tails") {
  const std::size_t d = 64;
  const double m = std::sqrt(static_cast<double>(d));
  const auto sampler = [&](std::uint64_t s) {
    return sample_hard_example(m, d, 1, s).row_copy(0);
  };
  const TailReport r = hw_tail_compare(sampler, DenseMatrix::identity(d),
                                       DenseMatrix::identity(d), 20000, 31);
  CHECK(quantile_at(r, 0.999, false) >= 3.0 * quantile_at(r, 0.999, true));
}

TEST_CASE("psi2_estimate closed forms") {
  SUBCASE("all-zero samples") {
    std::vector<double> zeros(20000, 0.0);
    CHECK(psi2_estimate(zeros) == 0.0);
  }
  SUBCASE("rademacher") {
    std::vector<double> xs(200000);
    SplitMix64 rng(37);
    for (double& x : xs) x = rng.next_rademacher();
    const double target = 1.0 / std::sqrt(std::log(2.0));
    CHECK(psi2_estimate(xs) == doctest::Approx(target).epsilon(0.02));
  }
  SUBCASE("standard normal at a million samples") {
    std::vector<double> xs(1000000);
    SplitMix64 rng(41);
    for (double& x : xs) x = rng.next_normal();
    const double target = std::sqrt(8.0 / 3.0);
    CHECK(psi2_estimate(xs) == doctest::Approx(target).epsilon(0.03));
  }
  SUBCASE("too few samples") {
    std::vector<double> xs(100, 1.0);
    CHECK_THROWS_AS(psi2_estimate(xs), TooFewSamplesError);
  }
}

TEST_CASE("psi2_estimate scales linearly") {
  std::vector<double> xs(50000);
  SplitMix64 rng(43);
  for (double& x : xs) x = rng.next_normal();
  const double base = psi2_estimate(xs);
  std::vector<double> scaled = xs;
  for (double& x : scaled) x *= 2.5;
  CHECK(psi2_estimate(scaled) == doctest::Approx(2.5 * base).epsilon(1e-4));
}

TEST_CASE("subspace_distortion vanishes for exact isometries") {
  const DenseMatrix a = random_matrix(32, 5, 47);
  CHECK(subspace_distortion(a, a) == doctest::Approx(0.0).epsilon(1e-10));

  const DenseMatrix sa = detail::srht_apply(a, 32, 7, false);
  CHECK(subspace_distortion(sa, a) <= 1e-8);
}

TEST_CASE("subspace_distortion of a moderate sparse sketch") {
  const std::size_t d = 10;
  const DenseMatrix a = random_matrix(2000, d, 53);
  const LeverageProfile profile = exact_leverage_scores(a);
  std::size_t good = 0;
  const std::size_t seeds = 30;
  std::vector<char> ok(seeds, 0);
  parallel_for(seeds, [&](std::size_t s) {
    SketchSpec spec{SketchFamily::Less, 1000, 0, false, derive_seed(59, s)};
    const DenseMatrix sa = sketch_apply(spec, a, &profile);
    const double eps = subspace_distortion(sa, a);
    ok[s] = eps >= 0.0 && eps <= 0.35;
  });
  for (char c : ok) good += c;
  CHECK(good >= 28);
}

TEST_CASE("jl_distortion basics") {
  const DenseMatrix pts = random_matrix(16, 6, 61);
  CHECK(jl_distortion(pts, pts) == doctest::Approx(0.0));

  const DenseMatrix spts = detail::srht_apply(pts, 16, 3, false);
  CHECK(jl_distortion(spts, pts) <= 1e-8);

  DenseMatrix with_zero = pts;
  for (std::size_t i = 0; i < 16; ++i) with_zero(i, 2) = 0.0;
  CHECK_THROWS_AS(jl_distortion(spts, with_zero), ZeroVectorError);
}

TEST_CASE("jl_distortion of sparse sketches on a span point set") {
  const std::size_t d = 10, n_rows = 1024, points = 20;
  const DenseMatrix a = random_matrix(n_rows, d, 67);
  const LeverageProfile profile = exact_leverage_scores(a);
  // 20 random vectors in the column span.
  const DenseMatrix coeffs = random_matrix(d, points, 71);
  const DenseMatrix originals = matmul(a, coeffs);

  std::size_t good = 0;
  const std::size_t seeds = 30;
  for (std::uint64_t s = 0; s < seeds; ++s) {
    SketchSpec spec{SketchFamily::Less, 1000, 0, false, derive_seed(73, s)};
    const DenseMatrix sketched = matmul(sketch_apply(spec, a, &profile), coeffs);
    if (jl_distortion(sketched, originals) <= 0.35) ++good;
  }
  CHECK(good >= 28);
}

TEST_CASE("sketch_leverage_uniformity closed cases") {
  // orthogonal square: every leverage is exactly 1 = d/n
  const DenseMatrix q = qr_thin(random_matrix(6, 6, 79)).q;
  CHECK(sketch_leverage_uniformity(q) == doctest::Approx(0.0).epsilon(1e-10));

  // a duplicated dominant row concentrates leverage
  DenseMatrix sa = random_matrix(10, 2, 83);
  sa(0, 0) = 1000.0;
  sa(0, 1) = 0.0;
  sa(1, 0) = 1000.0;
  sa(1, 1) = 0.0;
  CHECK(sketch_leverage_uniformity(sa) >= 1.0);
}

TEST_CASE("hat matrix identity: in-span probes give exactly zero") {
  // (I - H_sketch) annihilates S·(A x) by construction.
  const std::size_t n_rows = 120, d = 4;
  const RegressionProblem p = RegressionProblem::from(random_matrix(n_rows, d, 89),
                                                      DenseVector(n_rows, 1.0));
  const DenseVector x{0.3, -1.0, 2.0, 0.7};
  const DenseVector ax = matvec(p.a, x);
  for (std::uint64_t s = 0; s < 20; ++s) {
    SketchSpec spec{SketchFamily::Gaussian, 24, 0, false, s};
    const SketchedPair sk = sketch_pair(p.a, ax, spec, &p.leverage);
    const ThinQR f = qr_thin(sk.sa);
    const DenseVector fitted = matvec(f.q, matvec_transposed(f.q, sk.sb));
    CHECK(subtract(sk.sb, fitted).norm() <= 1e-8 * sk.sb.norm());
  }
}

TEST_CASE("hat_matrix_expectation_check: gaussian sketches at modest trials") {
  const RegressionProblem p = RegressionProblem::from(random_matrix(100, 5, 97),
                                                      DenseVector(100, 1.0));
  SketchSpec spec{SketchFamily::Gaussian, 25, 0, false, 0};
  const double dev = hat_matrix_expectation_check(p, spec, 4000, 101);
  CHECK(dev <= 0.12);  // stderr-limited at 4000 trials; the 20000-trial run is in acceptance
}
