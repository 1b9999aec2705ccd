#include "lesskit/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "lesskit/rng.hpp"

namespace lesskit {

ThinQR qr_thin(const DenseMatrix& a) {
  const std::size_t n = a.rows();
  const std::size_t d = a.cols();
  if (n < d) throw DimensionMismatchError("qr_thin: matrix has more columns than rows");
  const double rank_tol = 1e-12 * frobenius_norm(a);

  // Householder vectors are accumulated in place of the lower triangle of a
  // working copy; Q is formed explicitly afterwards.
  DenseMatrix work = a;
  std::vector<double> beta(d, 0.0);

  for (std::size_t j = 0; j < d; ++j) {
    auto cj = work.col(j);
    double sigma = 0.0;
    for (std::size_t i = j; i < n; ++i) sigma += cj[i] * cj[i];
    const double norm_x = std::sqrt(sigma);
    const double alpha = cj[j] >= 0.0 ? -norm_x : norm_x;

    if (std::abs(alpha) < rank_tol)
      throw RankDeficientError("qr_thin: rank-deficient column " + std::to_string(j));

    // v = x - alpha e_j, normalized so v[j] = 1.
    const double vj = cj[j] - alpha;
    beta[j] = -vj / alpha;  // = 2 / ‖v‖² with the v[j]=1 scaling
    for (std::size_t i = j + 1; i < n; ++i) cj[i] /= vj;
    cj[j] = alpha;

    for (std::size_t c = j + 1; c < d; ++c) {
      auto cc = work.col(c);
      double s = cc[j];
      for (std::size_t i = j + 1; i < n; ++i) s += cj[i] * cc[i];
      s *= beta[j];
      cc[j] -= s;
      for (std::size_t i = j + 1; i < n; ++i) cc[i] -= s * cj[i];
    }
  }

  ThinQR out;
  out.r = DenseMatrix(d, d);
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t i = 0; i <= j; ++i) out.r(i, j) = work(i, j);

  // Q = H_0 H_1 ... H_{d-1} applied to the first d identity columns.
  out.q = DenseMatrix(n, d);
  for (std::size_t j = 0; j < d; ++j) out.q(j, j) = 1.0;
  for (std::size_t j = d; j-- > 0;) {
    auto vj = work.col(j);
    for (std::size_t c = 0; c < d; ++c) {
      auto qc = out.q.col(c);
      double s = qc[j];
      for (std::size_t i = j + 1; i < n; ++i) s += vj[i] * qc[i];
      s *= beta[j];
      qc[j] -= s;
      for (std::size_t i = j + 1; i < n; ++i) qc[i] -= s * vj[i];
    }
  }

  // Canonicalize to a nonnegative R diagonal.
  for (std::size_t j = 0; j < d; ++j) {
    if (out.r(j, j) < 0.0) {
      for (std::size_t c = j; c < d; ++c) out.r(j, c) = -out.r(j, c);
      auto qj = out.q.col(j);
      for (std::size_t i = 0; i < n; ++i) qj[i] = -qj[i];
    }
  }
  return out;
}

DenseVector solve_upper(const DenseMatrix& r, const DenseVector& b) {
  const std::size_t d = r.cols();
  DenseVector x(d);
  for (std::size_t j = d; j-- > 0;) {
    double s = b[j];
    for (std::size_t c = j + 1; c < d; ++c) s -= r(j, c) * x[c];
    x[j] = s / r(j, j);
  }
  return x;
}

DenseVector solve_upper_transposed(const DenseMatrix& r, const DenseVector& b) {
  const std::size_t d = r.cols();
  DenseVector x(d);
  for (std::size_t j = 0; j < d; ++j) {
    double s = b[j];
    for (std::size_t c = 0; c < j; ++c) s -= r(c, j) * x[c];
    x[j] = s / r(j, j);
  }
  return x;
}

DenseVector solve_least_squares(const DenseMatrix& a, const DenseVector& b) {
  if (a.rows() != b.len())
    throw DimensionMismatchError("solve_least_squares: row count mismatch");
  const ThinQR f = qr_thin(a);
  return solve_upper(f.r, matvec_transposed(f.q, b));
}

DenseMatrix sherman_morrison_inverse_update(const DenseMatrix& ainv, const DenseVector& u,
                                            const DenseVector& v) {
  const std::size_t d = ainv.rows();
  if (ainv.cols() != d || u.len() != d || v.len() != d)
    throw DimensionMismatchError("sherman_morrison_inverse_update: size mismatch");
  const DenseVector ainv_u = matvec(ainv, u);
  const DenseVector vt_ainv = matvec_transposed(ainv, v);
  const double denom = 1.0 + dot(v, ainv_u);
  if (std::abs(denom) < 1e-12)
    throw SingularUpdateError("sherman_morrison_inverse_update: update is singular");
  DenseMatrix out = ainv;
  for (std::size_t j = 0; j < d; ++j) {
    auto cj = out.col(j);
    const double scale = vt_ainv[j] / denom;
    for (std::size_t i = 0; i < d; ++i) cj[i] -= ainv_u[i] * scale;
  }
  return out;
}

void fwht_inplace(std::span<double> x) {
  const std::size_t n = x.size();
  if (n == 0 || (n & (n - 1)) != 0)
    throw NotPowerOfTwoError("fwht_inplace: length is not a power of two");
  for (std::size_t h = 1; h < n; h *= 2) {
    for (std::size_t i = 0; i < n; i += 2 * h) {
      for (std::size_t j = i; j < i + h; ++j) {
        const double u = x[j];
        const double v = x[j + h];
        x[j] = u + v;
        x[j + h] = u - v;
      }
    }
  }
}

void fwht_inplace(DenseVector& x) { fwht_inplace(x.data()); }

double spectral_norm(const DenseMatrix& a) {
  const double fro = frobenius_norm(a);
  if (fro == 0.0) throw ZeroMatrixError("spectral_norm: zero matrix");

  // Power iteration on AᵀA from a fixed seeded start vector.
  SplitMix64 rng(0x5EC7AA1DULL);
  DenseVector x(a.cols());
  for (std::size_t j = 0; j < a.cols(); ++j) x[j] = rng.next_normal();
  double lambda = 0.0;
  for (int it = 0; it < 1000; ++it) {
    DenseVector y = matvec_transposed(a, matvec(a, x));
    const double ynorm = y.norm();
    if (ynorm == 0.0) return 0.0;  // start vector in the null space: restart
    for (std::size_t j = 0; j < y.len(); ++j) y[j] /= ynorm;
    const double next = ynorm;  // Rayleigh quotient of the normalized iterate
    x = y;
    if (it > 0 && std::abs(next - lambda) <= 1e-8 * next) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  return std::sqrt(lambda);
}

double stable_rank(const DenseMatrix& a) {
  const double fro2 = [&] {
    double s = 0.0;
    for (double x : a.data()) s += x * x;
    return s;
  }();
  if (fro2 == 0.0) throw ZeroMatrixError("stable_rank: zero matrix");
  const double spec = spectral_norm(a);
  return fro2 / (spec * spec);
}

std::vector<double> symmetric_eigenvalues(const DenseMatrix& m, DenseMatrix* eigenvectors) {
  const std::size_t d = m.rows();
  if (m.cols() != d) throw DimensionMismatchError("symmetric_eigenvalues: not square");
  DenseMatrix a = m;
  DenseMatrix v;
  if (eigenvectors) v = DenseMatrix::identity(d);

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t q = 1; q < d; ++q)
      for (std::size_t p = 0; p < q; ++p) off += a(p, q) * a(p, q);
    if (off <= 1e-30 * frobenius_norm(m) * frobenius_norm(m) || off == 0.0) break;

    for (std::size_t q = 1; q < d; ++q) {
      for (std::size_t p = 0; p < q; ++p) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t i = 0; i < d; ++i) {
          const double aip = a(i, p);
          const double aiq = a(i, q);
          a(i, p) = c * aip - s * aiq;
          a(i, q) = s * aip + c * aiq;
        }
        for (std::size_t i = 0; i < d; ++i) {
          const double api = a(p, i);
          const double aqi = a(q, i);
          a(p, i) = c * api - s * aqi;
          a(q, i) = s * api + c * aqi;
        }
        if (eigenvectors) {
          for (std::size_t i = 0; i < d; ++i) {
            const double vip = v(i, p);
            const double viq = v(i, q);
            v(i, p) = c * vip - s * viq;
            v(i, q) = s * vip + c * viq;
          }
        }
      }
    }
  }

  std::vector<std::size_t> order(d);
  for (std::size_t i = 0; i < d; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });
  std::vector<double> eig(d);
  for (std::size_t i = 0; i < d; ++i) eig[i] = a(order[i], order[i]);
  if (eigenvectors) {
    *eigenvectors = DenseMatrix(d, d);
    for (std::size_t j = 0; j < d; ++j)
      for (std::size_t i = 0; i < d; ++i) (*eigenvectors)(i, j) = v(i, order[j]);
  }
  return eig;
}

DenseMatrix symmetric_inverse_sqrt(const DenseMatrix& m) {
  DenseMatrix vecs;
  const std::vector<double> eig = symmetric_eigenvalues(m, &vecs);
  const std::size_t d = m.rows();
  if (eig.front() <= 0.0)
    throw RankDeficientError("symmetric_inverse_sqrt: matrix not positive definite");
  DenseMatrix out(d, d);
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t i = 0; i <= j; ++i) {
      double s = 0.0;
      for (std::size_t l = 0; l < d; ++l)
        s += vecs(i, l) * vecs(j, l) / std::sqrt(eig[l]);
      out(i, j) = s;
      out(j, i) = s;
    }
  }
  return out;
}

DenseMatrix invert_dense(const DenseMatrix& a) {
  const std::size_t d = a.rows();
  if (a.cols() != d) throw DimensionMismatchError("invert_dense: not square");
  DenseMatrix work = a;
  DenseMatrix inv = DenseMatrix::identity(d);
  for (std::size_t j = 0; j < d; ++j) {
    std::size_t piv = j;
    for (std::size_t i = j + 1; i < d; ++i)
      if (std::abs(work(i, j)) > std::abs(work(piv, j))) piv = i;
    if (std::abs(work(piv, j)) < 1e-14 * (1.0 + frobenius_norm(a)))
      throw RankDeficientError("invert_dense: singular matrix");
    if (piv != j) {
      for (std::size_t c = 0; c < d; ++c) {
        std::swap(work(j, c), work(piv, c));
        std::swap(inv(j, c), inv(piv, c));
      }
    }
    const double pivot = work(j, j);
    for (std::size_t c = 0; c < d; ++c) {
      work(j, c) /= pivot;
      inv(j, c) /= pivot;
    }
    for (std::size_t i = 0; i < d; ++i) {
      if (i == j) continue;
      const double f = work(i, j);
      if (f == 0.0) continue;
      for (std::size_t c = 0; c < d; ++c) {
        work(i, c) -= f * work(j, c);
        inv(i, c) -= f * inv(j, c);
      }
    }
  }
  return inv;
}

}  // namespace lesskit
