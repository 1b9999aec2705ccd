#include "lesskit/leverage.hpp"

#include <cmath>

#include "lesskit/sketch.hpp"

namespace lesskit {

namespace {

void finish_profile(LeverageProfile& profile, std::size_t n_rows) {
  profile.coherence = 0.0;
  for (double l : profile.scores) profile.coherence = std::max(profile.coherence, l);
  profile.probs = mixture_probabilities(profile, n_rows);
}

}  // namespace

LeverageProfile leverage_profile_from_qr(const ThinQR& qr) {
  const std::size_t n = qr.q.rows();
  const std::size_t d = qr.q.cols();
  LeverageProfile profile;
  profile.scores.assign(n, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    auto col = qr.q.col(j);
    for (std::size_t i = 0; i < n; ++i) profile.scores[i] += col[i] * col[i];
  }
  profile.exact = true;
  finish_profile(profile, n);
  return profile;
}

LeverageProfile exact_leverage_scores(const DenseMatrix& a) {
  return leverage_profile_from_qr(qr_thin(a));
}

LeverageProfile approx_leverage_scores(const DenseMatrix& a, std::size_t oversample,
                                       std::uint64_t seed) {
  const std::size_t n = a.rows();
  const std::size_t d = a.cols();
  if (oversample == 0) oversample = 1;

  // Row sketch of ~4·d·oversample rows; at the padded size the transform is a
  // bijection and the estimate collapses to the exact scores.
  std::size_t sketch_rows = 4 * d * oversample;
  std::size_t padded = 1;
  while (padded < n) padded *= 2;
  sketch_rows = std::min(sketch_rows, padded);

  const DenseMatrix sa = detail::srht_apply(a, sketch_rows, seed, false);
  const ThinQR f = qr_thin(sa);  // RankDeficientError -> caller raises oversample

  LeverageProfile profile;
  profile.scores.assign(n, 0.0);
  DenseVector row(d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) row[j] = a(i, j);
    const DenseVector w = solve_upper_transposed(f.r, row);  // R₀⁻ᵀ aᵢ
    profile.scores[i] = w.squared_norm();
  }
  profile.exact = false;
  finish_profile(profile, n);
  return profile;
}

std::vector<double> mixture_probabilities(const LeverageProfile& profile, std::size_t n_rows) {
  if (profile.scores.size() != n_rows)
    throw DimensionMismatchError("mixture_probabilities: profile size mismatch");
  if (n_rows == 0) throw InvalidDistributionError("mixture_probabilities: empty profile");

  double score_sum = 0.0;
  for (double l : profile.scores) score_sum += l;
  // Exact scores sum to d; the sum doubles as the mixture normalizer so the
  // construction stays a probability vector for estimated scores too.
  const double d_norm = score_sum > 0.0 ? score_sum : 1.0;

  const double inv_n = 1.0 / static_cast<double>(n_rows);
  std::vector<double> probs(n_rows);
  double total = 0.0;
  for (std::size_t i = 0; i < n_rows; ++i) {
    probs[i] = 0.5 * (profile.scores[i] / d_norm + inv_n);
    total += probs[i];
  }
  for (double& p : probs) p /= total;
  return probs;
}

}  // namespace lesskit
