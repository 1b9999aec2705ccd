#pragma once

#include <cstdint>
#include <functional>
#include <limits>

#include "lesskit/leverage.hpp"
#include "lesskit/linalg.hpp"
#include "lesskit/matrix.hpp"
#include "lesskit/sketch.hpp"

namespace lesskit {

// A least-squares task with its factorization, optimum and optimal loss
// cached. Immutable after construction and shareable across threads.
struct RegressionProblem {
  DenseMatrix a;
  DenseVector b;
  ThinQR qr;
  DenseVector w_star;
  double loss_star = 0.0;   // ‖A w* − b‖²
  LeverageProfile leverage; // exact, derived from qr

  static RegressionProblem from(DenseMatrix a, DenseVector b);

  std::size_t n_rows() const { return a.rows(); }
  std::size_t dim() const { return a.cols(); }

  // ‖A w − b‖², evaluated through the cached factorization:
  // L(w) = L(w*) + ‖R (w − w*)‖².
  double loss(const DenseVector& w) const;
};

struct ConstrainedProblem {
  RegressionProblem base;
  double radius = 0.0;           // ℓ1 ball
  std::size_t sparsity_hint = 0; // expected support size of the solution
};

// Expected normalized excess loss of a Gaussian-sketched solver:
// d / (n − d − 1). Requires n ≥ d + 2.
double ols_error_law(std::size_t d, std::size_t n);

struct OlsSolveResult {
  DenseVector w;
  double normalized_error = 0.0;  // (L(ŵ) − L(w*)) / L(w*); +inf when degenerate
  bool degenerate_loss = false;   // L(w*) ≈ 0, the ratio is undefined
  int redraws = 0;                // rank-deficient sketches redrawn
};

// Solves the sketched problem min_w ‖SA w − Sb‖². A rank-deficient sketch is
// redrawn with a derived subseed up to 3 times before
// RankDeficientSketchError; solution entries are clamped to ±1e12. The
// leverage-based family samples from p.leverage unless a profile override
// (e.g. sketch-estimated scores) is supplied.
OlsSolveResult sketch_and_solve_ols(const RegressionProblem& p, const SketchSpec& spec,
                                    const LeverageProfile* profile = nullptr);

// Leave-one-out cross-validation loss of the sketched solver via the
// rank-one-downdate shortcut: Σ_i ((x̃ᵢᵀŵ − ỹᵢ)/(1 − ℓᵢ))² with ℓᵢ the
// leverage scores of SA. Equals the naive per-row re-solve up to roundoff.
// Throws LeverageAtOneError when some ℓᵢ ≥ 1 − 1e-10.
double loo_cv_loss(const RegressionProblem& p, const SketchedPair& sketched);

// Euclidean projection onto {‖w‖₁ ≤ radius}.
DenseVector l1_ball_project(const DenseVector& w, double radius);

// argmin over the ℓ1 ball of ‖a w − b‖² by accelerated projected gradient
// with adaptive restart; stops when the projected-gradient mapping norm drops
// to tol·‖aᵀb‖ (10000-iteration cap, NoConvergenceError if still 100× above).
// Restarts keep the per-iteration objective nonincreasing; pass a trace to
// observe it.
DenseVector l1_constrained_lstsq(const DenseMatrix& a, const DenseVector& b, double radius,
                                 double tol, std::vector<double>* objective_trace = nullptr);

// Sketch-and-solve for the constrained problem: same solver on (SA, Sb).
DenseVector constrained_sketch_solve(const ConstrainedProblem& cp, const SketchSpec& spec,
                                     double tol);

struct WidthEstimate {
  double mean = 0.0;
  double stderr_of_mean = 0.0;
};

// Monte Carlo Gaussian width: mean and standard error of support_fn(g) over
// i.i.d. standard normal g of dimension u_basis.rows().
WidthEstimate gaussian_width_mc(const DenseMatrix& u_basis,
                                const std::function<double(const DenseVector&)>& support_fn,
                                std::size_t trials, std::uint64_t seed);

// Support function of a d-dimensional subspace intersected with the sphere:
// g ↦ ‖Uᵀg‖ for an orthonormal basis U.
std::function<double(const DenseVector&)> subspace_support_fn(const DenseMatrix& u_basis);

// max_i ‖A_{:,i}‖ / γ̂ where γ̂ minimizes σ_min over column subsets of size
// ≤ 4s. Such unit vectors satisfy ‖v‖₁ ≤ 2√s, so γ̂ ≥ γ_s⁻ and the returned
// value is a heuristic that never overstates the restricted condition number.
// Brute-force regime only: throws DimensionTooLargeError for d > 20.
double restricted_condition_small(const DenseMatrix& a, std::size_t s);

// ‖A − A·Proj‖_F² with Proj the orthogonal projection onto the row span of
// sketched_rows (rank-deficient spans handled; zero rows give ‖A‖_F²).
double randomized_svd_error(const DenseMatrix& a, const DenseMatrix& sketched_rows);

// Σ_j σ_j²/(σ_j² + λ) over the singular values of a.
double statdim(const DenseMatrix& a, double lambda);

// λ with statdim(a, λ) = n, by bisection. Requires 0 < n < statdim(a, 0).
double statdim_inverse(const DenseMatrix& a, double n);

}  // namespace lesskit
