#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "lesskit/estimators.hpp"
#include "lesskit/matrix.hpp"
#include "lesskit/sketch.hpp"

namespace lesskit {

// Empirical tail quantiles of a statistic next to the same quantiles for a
// standard Gaussian row baseline.
struct TailReport {
  std::string statistic_name;
  std::vector<std::pair<double, double>> quantiles;           // level -> value
  std::size_t trials = 0;
  std::vector<std::pair<double, double>> reference_quantiles; // Gaussian rows
};

// |zᵀBz − tr B|. Only the symmetric part of B enters, exactly.
double hanson_wright_stat(const DenseVector& z, const DenseMatrix& bmat);

// Draws trials whitened rows, computes the quadratic-form statistic for each,
// and reports quantiles at {0.5, 0.9, 0.99, 0.999} alongside a Gaussian-row
// baseline on the same bmat. row_sampler(seed) must return one raw row.
TailReport hw_tail_compare(const std::function<DenseVector(std::uint64_t)>& row_sampler,
                           const DenseMatrix& whitener, const DenseMatrix& bmat,
                           std::size_t trials, std::uint64_t seed);

// Plug-in sub-gaussian Orlicz norm: smallest t with the empirical mean of
// exp(X²/t²) at most 2, with the top 0.01% of X² winsorized. Consistent but
// biased low in extreme tails. Needs ≥ 10000 samples.
double psi2_estimate(std::span<const double> samples);

// Worst relative norm distortion of the sketch over the column span of a,
// after the best single rescaling α = √(2/(σ_max² + σ_min²)).
double subspace_distortion(const DenseMatrix& sa, const DenseMatrix& a);

// Same distortion measure over a finite point set given as matched columns of
// sketched/original matrices.
double jl_distortion(const DenseMatrix& sa_vectors, const DenseMatrix& originals);

// max_i |ℓ_i(SA)·n/d − 1| over the sketch-row leverage scores.
double sketch_leverage_uniformity(const DenseMatrix& sa);

// Monte Carlo check of E[Sᵀ(I−Ĥ)S] against (1 − d/n)(I−H) on 10 random probe
// directions orthogonal to span(A); returns the worst |ratio − 1|.
double hat_matrix_expectation_check(const RegressionProblem& p, const SketchSpec& spec,
                                    std::size_t trials, std::uint64_t seed);

}  // namespace lesskit
