#pragma once

#include <cstdint>
#include <vector>

#include "lesskit/linalg.hpp"
#include "lesskit/matrix.hpp"

namespace lesskit {

// Statistical leverage scores of the rows of an N×d matrix, together with the
// mixture sampling distribution built from them. Exact scores satisfy
// l_i ∈ [0, 1] and Σ l_i = d; sketch-estimated scores may overshoot 1 by the
// estimation factor and are flagged exact = false.
struct LeverageProfile {
  std::vector<double> scores;  // l_i
  std::vector<double> probs;   // p_i = ((l_i/d) + (1/N)) / 2, renormalized
  double coherence = 0.0;      // max_i l_i
  bool exact = false;
};

// l_i = a_iᵀ(AᵀA)^{-1}a_i computed as squared row norms of the thin-QR Q
// factor. Requires full column rank.
LeverageProfile exact_leverage_scores(const DenseMatrix& a);

// Same scores when a thin QR of the matrix is already available.
LeverageProfile leverage_profile_from_qr(const ThinQR& qr);

// Sketch-based estimates: an internal row sketch of ~4·d·oversample rows
// whitens the geometry, and scores are squared row norms in the whitened
// space. Each score lands within a factor 2 of the exact one with high
// probability over the seed.
LeverageProfile approx_leverage_scores(const DenseMatrix& a, std::size_t oversample,
                                       std::uint64_t seed);

// Equal-weight mixture of the leverage distribution and the uniform one:
// p_i = ((l_i/d) + (1/N)) / 2, defensively renormalized to sum to 1. This
// dominates both l_i/(2d) and 1/(2N) pointwise.
std::vector<double> mixture_probabilities(const LeverageProfile& profile, std::size_t n_rows);

}  // namespace lesskit
