#include "lesskit/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "lesskit/parallel.hpp"
#include "lesskit/rng.hpp"

namespace lesskit {

namespace {

constexpr double kQuantileLevels[] = {0.5, 0.9, 0.99, 0.999};
constexpr std::uint64_t kSampleTag = 0x73616D70ULL;
constexpr std::uint64_t kBaselineTag = 0x62617365ULL;
constexpr std::uint64_t kProbeTag = 0x70726F62ULL;
constexpr std::uint64_t kTrialTag = 0x7472696CULL;

std::vector<std::pair<double, double>> quantiles_of(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  std::vector<std::pair<double, double>> out;
  for (double level : kQuantileLevels) {
    const std::size_t rank = static_cast<std::size_t>(
        std::ceil(level * static_cast<double>(values.size())));
    out.emplace_back(level, values[std::min(rank == 0 ? 0 : rank - 1, values.size() - 1)]);
  }
  return out;
}

}  // namespace

double hanson_wright_stat(const DenseVector& z, const DenseMatrix& bmat) {
  const std::size_t d = z.len();
  if (bmat.rows() != d || bmat.cols() != d)
    throw DimensionMismatchError("hanson_wright_stat: dimension mismatch");
  double quad = 0.0;
  double trace = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < d; ++i)
      acc += z[i] * ((bmat(i, j) + bmat(j, i)) * 0.5);
    quad += acc * z[j];
    trace += bmat(j, j);
  }
  return std::abs(quad - trace);
}

TailReport hw_tail_compare(const std::function<DenseVector(std::uint64_t)>& row_sampler,
                           const DenseMatrix& whitener, const DenseMatrix& bmat,
                           std::size_t trials, std::uint64_t seed) {
  if (trials < 1000) throw std::invalid_argument("hw_tail_compare: need trials >= 1000");
  const std::size_t d = bmat.rows();

  std::vector<double> stats(trials);
  std::vector<double> baseline(trials);
  parallel_for(trials, [&](std::size_t t) {
    const DenseVector raw = row_sampler(derive_seed(seed, kSampleTag, t));
    const DenseVector z = matvec(whitener, raw);
    stats[t] = hanson_wright_stat(z, bmat);

    SplitMix64 rng(derive_seed(seed, kBaselineTag, t));
    DenseVector g(d);
    for (std::size_t i = 0; i < d; ++i) g[i] = rng.next_normal();
    baseline[t] = hanson_wright_stat(g, bmat);
  });

  TailReport report;
  report.statistic_name = "hanson-wright";
  report.trials = trials;
  report.quantiles = quantiles_of(std::move(stats));
  report.reference_quantiles = quantiles_of(std::move(baseline));
  return report;
}

double psi2_estimate(std::span<const double> samples) {
  if (samples.size() < 10000)
    throw TooFewSamplesError("psi2_estimate: need at least 10000 samples");
  const std::size_t n = samples.size();

  std::vector<double> sq(n);
  for (std::size_t i = 0; i < n; ++i) sq[i] = samples[i] * samples[i];

  std::vector<double> sorted = sq;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t cap_rank = static_cast<std::size_t>(
      std::ceil((1.0 - 1e-4) * static_cast<double>(n)));
  const double cap = sorted[std::min(cap_rank == 0 ? 0 : cap_rank - 1, n - 1)];
  for (double& x : sq) x = std::min(x, cap);

  const double max_sq = cap;
  if (max_sq == 0.0) return 0.0;  // every t works; infimum is 0

  const auto winsorized_mean = [&](double t) {
    const double inv_t2 = 1.0 / (t * t);
    std::vector<double> vals(n);
    for (std::size_t i = 0; i < n; ++i) vals[i] = std::exp(sq[i] * inv_t2);
    return pairwise_sum(vals) / static_cast<double>(n);
  };

  double hi = 2.0 * std::sqrt(max_sq);  // mean ≤ exp(1/4) < 2 here
  double lo = 0.0;
  while ((hi - lo) > 1e-6 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (winsorized_mean(mid) <= 2.0)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

double subspace_distortion(const DenseMatrix& sa, const DenseMatrix& a) {
  if (sa.cols() != a.cols())
    throw DimensionMismatchError("subspace_distortion: column count mismatch");
  const ThinQR f = qr_thin(a);

  // W = SA·R⁻¹ shares singular values with SA·(AᵀA)^{-1/2}.
  DenseMatrix w(sa.rows(), sa.cols());
  DenseVector row(sa.cols());
  for (std::size_t i = 0; i < sa.rows(); ++i) {
    for (std::size_t j = 0; j < sa.cols(); ++j) row[j] = sa(i, j);
    const DenseVector solved = solve_upper_transposed(f.r, row);
    for (std::size_t j = 0; j < sa.cols(); ++j) w(i, j) = solved[j];
  }

  const std::vector<double> eig = symmetric_eigenvalues(gram(w));
  const double smin2 = eig.front();
  const double smax2 = eig.back();
  if (smin2 <= 0.0)
    throw RankDeficientError("subspace_distortion: sketched matrix is rank-deficient");
  const double alpha = std::sqrt(2.0 / (smax2 + smin2));
  return std::max(std::sqrt(smax2) * alpha, 1.0 / (std::sqrt(smin2) * alpha)) - 1.0;
}

double jl_distortion(const DenseMatrix& sa_vectors, const DenseMatrix& originals) {
  if (sa_vectors.cols() != originals.cols())
    throw DimensionMismatchError("jl_distortion: point counts differ");
  const std::size_t m = originals.cols();
  if (m == 0) throw DimensionMismatchError("jl_distortion: empty point set");

  std::vector<double> ratios(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double orig = std::sqrt(dot(originals.col(j), originals.col(j)));
    if (orig == 0.0) throw ZeroVectorError("jl_distortion: zero original point");
    ratios[j] = std::sqrt(dot(sa_vectors.col(j), sa_vectors.col(j))) / orig;
  }
  const auto [lo_it, hi_it] = std::minmax_element(ratios.begin(), ratios.end());
  const double alpha = std::sqrt(2.0 / (*hi_it * *hi_it + *lo_it * *lo_it));
  double worst = 0.0;
  for (double r : ratios) worst = std::max(worst, std::abs(alpha * r - 1.0));
  return worst;
}

double sketch_leverage_uniformity(const DenseMatrix& sa) {
  const std::size_t n = sa.rows();
  const std::size_t d = sa.cols();
  if (n < d)
    throw DimensionMismatchError("sketch_leverage_uniformity: need n >= d");
  const ThinQR f = qr_thin(sa);

  std::vector<double> lev(n, 0.0);
  double total = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    auto col = f.q.col(j);
    for (std::size_t i = 0; i < n; ++i) lev[i] += col[i] * col[i];
  }
  for (double l : lev) total += l;
  if (std::abs(total - static_cast<double>(d)) > 1e-6)
    throw Error("sketch_leverage_uniformity: leverage scores do not sum to d");

  const double target = static_cast<double>(d) / static_cast<double>(n);
  double worst = 0.0;
  for (double l : lev) worst = std::max(worst, std::abs(l / target - 1.0));
  return worst;
}

double hat_matrix_expectation_check(const RegressionProblem& p, const SketchSpec& spec,
                                    std::size_t trials, std::uint64_t seed) {
  if (trials < 1000)
    throw std::invalid_argument("hat_matrix_expectation_check: need trials >= 1000");
  const std::size_t n_rows = p.n_rows();
  const std::size_t d = p.dim();
  if (spec.n <= d + 1)
    throw SketchTooSmallError("hat_matrix_expectation_check: need n > d + 1");

  constexpr std::size_t kProbes = 10;
  DenseMatrix probes(n_rows, kProbes);
  for (std::size_t j = 0; j < kProbes; ++j) {
    SplitMix64 rng(derive_seed(seed, kProbeTag, j));
    DenseVector v(n_rows);
    for (std::size_t i = 0; i < n_rows; ++i) v[i] = rng.next_normal();
    // Project out span(A), twice for orthogonality at roundoff level.
    for (int pass = 0; pass < 2; ++pass) {
      const DenseVector coeff = matvec_transposed(p.qr.q, v);
      const DenseVector in_span = matvec(p.qr.q, coeff);
      for (std::size_t i = 0; i < n_rows; ++i) v[i] -= in_span[i];
    }
    const double nv = v.norm();
    for (std::size_t i = 0; i < n_rows; ++i) probes(i, j) = v[i] / nv;
  }

  // Sketch [A | probes] per trial so Ĥ and the probe images share one S.
  DenseMatrix joint(n_rows, d + kProbes);
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t i = 0; i < n_rows; ++i) joint(i, j) = p.a(i, j);
  for (std::size_t j = 0; j < kProbes; ++j)
    for (std::size_t i = 0; i < n_rows; ++i) joint(i, d + j) = probes(i, j);

  std::vector<std::vector<double>> per_probe(kProbes, std::vector<double>(trials));
  parallel_for(trials, [&](std::size_t t) {
    SketchSpec trial_spec = spec;
    trial_spec.seed = derive_seed(seed, kTrialTag, t);
    for (int attempt = 0;; ++attempt) {
      const DenseMatrix sketched = sketch_apply(trial_spec, joint, &p.leverage);
      DenseMatrix sa(spec.n, d);
      for (std::size_t j = 0; j < d; ++j)
        for (std::size_t i = 0; i < spec.n; ++i) sa(i, j) = sketched(i, j);
      try {
        const ThinQR f = qr_thin(sa);
        for (std::size_t j = 0; j < kProbes; ++j) {
          DenseVector sv(spec.n);
          for (std::size_t i = 0; i < spec.n; ++i) sv[i] = sketched(i, d + j);
          const DenseVector coeff = matvec_transposed(f.q, sv);
          const DenseVector fitted = matvec(f.q, coeff);
          per_probe[j][t] = subtract(sv, fitted).squared_norm();
        }
        return;
      } catch (const RankDeficientError&) {
        if (attempt == 3)
          throw RankDeficientSketchError("hat_matrix_expectation_check: degenerate sketches");
        trial_spec.seed = derive_seed(seed, kTrialTag + 1 + attempt, t);
      }
    }
  });

  const double target = 1.0 - static_cast<double>(d) / static_cast<double>(spec.n);
  double worst = 0.0;
  for (std::size_t j = 0; j < kProbes; ++j) {
    const double mean = pairwise_sum(per_probe[j]) / static_cast<double>(trials);
    worst = std::max(worst, std::abs(mean / target - 1.0));
  }
  return worst;
}

}  // namespace lesskit
