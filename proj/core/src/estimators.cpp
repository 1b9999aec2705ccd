#include "lesskit/estimators.hpp"

#include <algorithm>
#include <cmath>

#include "lesskit/parallel.hpp"
#include "lesskit/rng.hpp"

namespace lesskit {

namespace {
constexpr double kSolutionClamp = 1e12;
constexpr std::uint64_t kRedrawTag = 0x7264726177ULL;
constexpr int kMaxRedraws = 3;
}  // namespace

RegressionProblem RegressionProblem::from(DenseMatrix a, DenseVector b) {
  if (a.rows() != b.len())
    throw DimensionMismatchError("RegressionProblem: a and b row counts differ");
  RegressionProblem p;
  p.a = std::move(a);
  p.b = std::move(b);
  p.qr = qr_thin(p.a);
  p.w_star = solve_upper(p.qr.r, matvec_transposed(p.qr.q, p.b));
  const DenseVector resid = subtract(matvec(p.a, p.w_star), p.b);
  p.loss_star = resid.squared_norm();
  p.leverage = leverage_profile_from_qr(p.qr);
  return p;
}

double RegressionProblem::loss(const DenseVector& w) const {
  const DenseVector delta = subtract(w, w_star);
  return loss_star + matvec(qr.r, delta).squared_norm();
}

double ols_error_law(std::size_t d, std::size_t n) {
  if (n < d + 2)
    throw SketchTooSmallError("ols_error_law: need n >= d + 2");
  return static_cast<double>(d) / static_cast<double>(n - d - 1);
}

OlsSolveResult sketch_and_solve_ols(const RegressionProblem& p, const SketchSpec& spec,
                                    const LeverageProfile* profile) {
  const std::size_t d = p.dim();
  if (spec.n < d)
    throw SketchTooSmallError("sketch_and_solve_ols: sketch has fewer rows than columns");
  if (!profile) profile = &p.leverage;

  OlsSolveResult out;
  SketchSpec attempt = spec;
  for (int redraw = 0;; ++redraw) {
    const SketchedPair pair = sketch_pair(p.a, p.b, attempt, profile);
    try {
      const ThinQR f = qr_thin(pair.sa);
      out.w = solve_upper(f.r, matvec_transposed(f.q, pair.sb));
      break;
    } catch (const RankDeficientError&) {
      if (redraw == kMaxRedraws)
        throw RankDeficientSketchError("sketch_and_solve_ols: rank-deficient after redraws");
      attempt.seed = derive_seed(spec.seed, kRedrawTag, static_cast<std::uint64_t>(redraw));
      out.redraws = redraw + 1;
    }
  }

  for (std::size_t j = 0; j < d; ++j)
    out.w[j] = std::clamp(out.w[j], -kSolutionClamp, kSolutionClamp);

  // L(ŵ) − L(w*) = ‖R(ŵ − w*)‖², exact for any ŵ since the optimal residual
  // is orthogonal to the column span.
  const DenseVector delta = subtract(out.w, p.w_star);
  const double excess = matvec(p.qr.r, delta).squared_norm();

  const double degenerate_floor = 1e-24 * p.b.squared_norm();
  if (p.loss_star <= degenerate_floor) {
    out.degenerate_loss = true;
    out.normalized_error = std::numeric_limits<double>::infinity();
  } else {
    out.normalized_error = excess / p.loss_star;
  }
  return out;
}

double loo_cv_loss(const RegressionProblem& p, const SketchedPair& sketched) {
  const std::size_t n = sketched.sa.rows();
  const std::size_t d = sketched.sa.cols();
  if (d != p.dim())
    throw DimensionMismatchError("loo_cv_loss: sketch dimension mismatch");
  if (sketched.sb.len() != n)
    throw DimensionMismatchError("loo_cv_loss: sa and sb row counts differ");

  const ThinQR f = qr_thin(sketched.sa);
  const DenseVector w_hat = solve_upper(f.r, matvec_transposed(f.q, sketched.sb));

  std::vector<double> lev(n, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    auto col = f.q.col(j);
    for (std::size_t i = 0; i < n; ++i) lev[i] += col[i] * col[i];
  }
  for (std::size_t i = 0; i < n; ++i)
    if (lev[i] >= 1.0 - 1e-10)
      throw LeverageAtOneError("loo_cv_loss: sketch-row leverage at one");

  const DenseVector fit = matvec(sketched.sa, w_hat);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = (fit[i] - sketched.sb[i]) / (1.0 - lev[i]);
    total += r * r;
  }
  return total;
}

DenseVector l1_ball_project(const DenseVector& w, double radius) {
  if (radius < 0.0) throw std::invalid_argument("l1_ball_project: negative radius");
  double l1 = 0.0;
  for (std::size_t i = 0; i < w.len(); ++i) l1 += std::abs(w[i]);
  if (l1 <= radius) return w;

  std::vector<double> mag(w.len());
  for (std::size_t i = 0; i < w.len(); ++i) mag[i] = std::abs(w[i]);
  std::sort(mag.begin(), mag.end(), std::greater<double>());

  // Largest k with mag_(k) > (Σ_{j<=k} mag_(j) − radius)/k fixes the
  // soft-threshold level.
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t k = 0; k < mag.size(); ++k) {
    cumulative += mag[k];
    const double candidate = (cumulative - radius) / static_cast<double>(k + 1);
    if (candidate < mag[k]) theta = candidate;
  }
  theta = std::max(theta, 0.0);

  DenseVector out(w.len());
  for (std::size_t i = 0; i < w.len(); ++i) {
    const double shrunk = std::abs(w[i]) - theta;
    out[i] = shrunk > 0.0 ? (w[i] > 0.0 ? shrunk : -shrunk) : 0.0;
  }
  return out;
}

DenseVector l1_constrained_lstsq(const DenseMatrix& a, const DenseVector& b, double radius,
                                 double tol, std::vector<double>* objective_trace) {
  if (!(radius > 0.0)) throw std::invalid_argument("l1_constrained_lstsq: radius must be > 0");
  if (!(tol > 0.0)) throw std::invalid_argument("l1_constrained_lstsq: tol must be > 0");
  const std::size_t d = a.cols();

  const double sigma_max = [&] {
    try {
      return spectral_norm(a);
    } catch (const ZeroMatrixError&) {
      return 0.0;
    }
  }();
  if (sigma_max == 0.0) return DenseVector(d);
  const double step = 1.0 / (2.0 * sigma_max * sigma_max);

  const DenseVector atb = matvec_transposed(a, b);
  const double gap_ref = tol * atb.norm();

  const auto objective = [&](const DenseVector& w) {
    return subtract(matvec(a, w), b).squared_norm();
  };
  const auto gradient = [&](const DenseVector& w) {
    DenseVector g = matvec_transposed(a, subtract(matvec(a, w), b));
    for (std::size_t j = 0; j < d; ++j) g[j] *= 2.0;
    return g;
  };
  const auto pg_step = [&](const DenseVector& w, const DenseVector& g) {
    DenseVector z(d);
    for (std::size_t j = 0; j < d; ++j) z[j] = w[j] - step * g[j];
    return l1_ball_project(z, radius);
  };

  DenseVector x(d);
  DenseVector y = x;
  double fx = objective(x);
  double t = 1.0;
  double gap = std::numeric_limits<double>::infinity();
  if (objective_trace) objective_trace->push_back(fx);

  for (int it = 0; it < 10000; ++it) {
    const DenseVector gx = gradient(x);
    const DenseVector x_pg = pg_step(x, gx);
    gap = subtract(x, x_pg).norm() / step;
    if (gap <= gap_ref) return x_pg;

    DenseVector x_next = pg_step(y, gradient(y));
    const double f_next = objective(x_next);
    if (f_next > fx) {
      // Momentum overshot: restart from the plain descent step, which cannot
      // increase the objective at step ≤ 1/L.
      x_next = x_pg;
      fx = objective(x_next);
      t = 1.0;
      y = x_next;
    } else {
      fx = f_next;
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      const double momentum = (t - 1.0) / t_next;
      DenseVector y_next(d);
      for (std::size_t j = 0; j < d; ++j)
        y_next[j] = x_next[j] + momentum * (x_next[j] - x[j]);
      y = y_next;
      t = t_next;
    }
    x = x_next;
    if (objective_trace) objective_trace->push_back(fx);
  }

  if (gap > 100.0 * gap_ref)
    throw NoConvergenceError("l1_constrained_lstsq: iteration cap hit");
  return x;
}

DenseVector constrained_sketch_solve(const ConstrainedProblem& cp, const SketchSpec& spec,
                                     double tol) {
  if (!(cp.radius > 0.0))
    throw std::invalid_argument("constrained_sketch_solve: radius must be > 0");
  const SketchedPair pair = sketch_pair(cp.base.a, cp.base.b, spec, &cp.base.leverage);
  return l1_constrained_lstsq(pair.sa, pair.sb, cp.radius, tol);
}

WidthEstimate gaussian_width_mc(const DenseMatrix& u_basis,
                                const std::function<double(const DenseVector&)>& support_fn,
                                std::size_t trials, std::uint64_t seed) {
  if (trials < 2) throw std::invalid_argument("gaussian_width_mc: need trials >= 2");
  const std::size_t ambient = u_basis.rows();
  std::vector<double> values(trials);
  parallel_for(trials, [&](std::size_t t) {
    SplitMix64 rng(derive_seed(seed, t));
    DenseVector g(ambient);
    for (std::size_t i = 0; i < ambient; ++i) g[i] = rng.next_normal();
    values[t] = support_fn(g);
  });
  const MeanStderr ms = mean_and_stderr(values);
  return {ms.mean, ms.stderr_of_mean};
}

std::function<double(const DenseVector&)> subspace_support_fn(const DenseMatrix& u_basis) {
  return [u_basis](const DenseVector& g) { return matvec_transposed(u_basis, g).norm(); };
}

double restricted_condition_small(const DenseMatrix& a, std::size_t s) {
  const std::size_t d = a.cols();
  if (d > 20)
    throw DimensionTooLargeError("restricted_condition_small: brute-force regime is d <= 20");
  if (s == 0) throw std::invalid_argument("restricted_condition_small: s must be positive");

  double max_col_norm = 0.0;
  for (std::size_t j = 0; j < d; ++j)
    max_col_norm = std::max(max_col_norm, std::sqrt(dot(a.col(j), a.col(j))));

  // Unit vectors on supports of size m ≤ 4s have ‖v‖₁ ≤ 2√s, so the subset
  // minimum is attained at m = min(4s, d); smaller supports are nested.
  const std::size_t m = std::min(4 * s, d);
  std::vector<std::size_t> subset(m);
  for (std::size_t i = 0; i < m; ++i) subset[i] = i;

  double min_sigma = std::numeric_limits<double>::infinity();
  const auto eval_subset = [&] {
    DenseMatrix sub(a.rows(), m);
    for (std::size_t j = 0; j < m; ++j) {
      auto src = a.col(subset[j]);
      auto dst = sub.col(j);
      for (std::size_t i = 0; i < a.rows(); ++i) dst[i] = src[i];
    }
    const std::vector<double> eig = symmetric_eigenvalues(gram(sub));
    min_sigma = std::min(min_sigma, std::sqrt(std::max(eig.front(), 0.0)));
  };

  // Lexicographic enumeration of all size-m column subsets.
  while (true) {
    eval_subset();
    std::size_t i = m;
    while (i-- > 0) {
      if (subset[i] != i + d - m) {
        ++subset[i];
        for (std::size_t j = i + 1; j < m; ++j) subset[j] = subset[j - 1] + 1;
        break;
      }
      if (i == 0) return max_col_norm / min_sigma;
    }
  }
}

double randomized_svd_error(const DenseMatrix& a, const DenseMatrix& sketched_rows) {
  const std::size_t d = a.cols();
  if (sketched_rows.cols() != d)
    throw DimensionMismatchError("randomized_svd_error: column count mismatch");

  // Orthonormal basis of the row span by modified Gram-Schmidt with a drop
  // tolerance, so rank-deficient (or all-zero) sketches are fine.
  double max_row_norm = 0.0;
  for (std::size_t i = 0; i < sketched_rows.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) s += sketched_rows(i, j) * sketched_rows(i, j);
    max_row_norm = std::max(max_row_norm, std::sqrt(s));
  }
  const double drop_tol = 1e-12 * max_row_norm;

  std::vector<DenseVector> basis;
  for (std::size_t i = 0; i < sketched_rows.rows() && basis.size() < d; ++i) {
    DenseVector v = sketched_rows.row_copy(i);
    for (int pass = 0; pass < 2; ++pass)
      for (const DenseVector& q : basis) axpy(-dot(v, q), q.data(), v.data());
    const double nv = v.norm();
    if (nv > drop_tol && nv > 0.0) {
      for (std::size_t j = 0; j < d; ++j) v[j] /= nv;
      basis.push_back(std::move(v));
    }
  }

  double fro2 = 0.0;
  for (double x : a.data()) fro2 += x * x;
  double captured = 0.0;
  for (const DenseVector& q : basis) captured += matvec(a, q).squared_norm();
  return std::max(fro2 - captured, 0.0);
}

namespace {
double statdim_from_eigs(const std::vector<double>& eig, double lambda) {
  double f = 0.0;
  for (double e : eig) {
    if (e <= 0.0) continue;
    f += e / (e + lambda);
  }
  return f;
}
}  // namespace

double statdim(const DenseMatrix& a, double lambda) {
  if (lambda < 0.0) throw std::invalid_argument("statdim: lambda must be >= 0");
  return statdim_from_eigs(symmetric_eigenvalues(gram(a)), lambda);
}

double statdim_inverse(const DenseMatrix& a, double n) {
  const std::vector<double> eig = symmetric_eigenvalues(gram(a));
  const double full = statdim_from_eigs(eig, 0.0);
  if (!(n > 0.0) || n >= full)
    throw OutOfRangeError("statdim_inverse: target outside (0, rank)");

  double hi = std::max(eig.back(), 1.0);
  while (statdim_from_eigs(eig, hi) > n) hi *= 2.0;
  double lo = 0.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (statdim_from_eigs(eig, mid) > n)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= 1e-13 * std::max(1.0, hi)) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace lesskit
