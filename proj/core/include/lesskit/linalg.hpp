#pragma once

#include <cstdint>

#include "lesskit/matrix.hpp"

namespace lesskit {

// Thin QR factorization: Q is N×d with orthonormal columns, R is d×d upper
// triangular with nonnegative diagonal, and QR reconstructs the input.
struct ThinQR {
  DenseMatrix q;
  DenseMatrix r;
};

// Householder QR of a full-column-rank N×d matrix (N ≥ d).
// Throws RankDeficientError when some |R_jj| < 1e-12 · ‖A‖_F.
ThinQR qr_thin(const DenseMatrix& a);

// argmin_w ‖aw − b‖² via thin QR.
DenseVector solve_least_squares(const DenseMatrix& a, const DenseVector& b);

// (A + uvᵀ)^{-1} from A^{-1} by the rank-one update formula.
// Throws SingularUpdateError when |1 + vᵀA^{-1}u| < 1e-12.
DenseMatrix sherman_morrison_inverse_update(const DenseMatrix& ainv, const DenseVector& u,
                                            const DenseVector& v);

// In-place unnormalized Walsh–Hadamard transform; applying twice yields
// len·x. Length must be a power of two.
void fwht_inplace(DenseVector& x);
void fwht_inplace(std::span<double> x);

// ‖A‖_F² / ‖A‖² with the spectral norm from power iteration
// (1e-8 relative convergence, 1000-iteration cap).
double stable_rank(const DenseMatrix& a);

// Spectral norm ‖A‖ by power iteration on AᵀA.
double spectral_norm(const DenseMatrix& a);

// Back substitution for upper triangular R: solves R x = b.
DenseVector solve_upper(const DenseMatrix& r, const DenseVector& b);

// Forward substitution: solves Rᵀ x = b for upper triangular R.
DenseVector solve_upper_transposed(const DenseMatrix& r, const DenseVector& b);

// Eigenvalues (ascending) of a symmetric matrix by cyclic Jacobi rotations;
// optionally accumulates the eigenvector matrix (columns match eigenvalues).
std::vector<double> symmetric_eigenvalues(const DenseMatrix& m, DenseMatrix* eigenvectors = nullptr);

// M^{-1/2} for symmetric positive definite M.
DenseMatrix symmetric_inverse_sqrt(const DenseMatrix& m);

// Dense inverse by Gauss-Jordan with partial pivoting; small matrices only.
DenseMatrix invert_dense(const DenseMatrix& a);

}  // namespace lesskit
