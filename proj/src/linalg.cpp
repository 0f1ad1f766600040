#include "lassoggm/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace lassoggm {

namespace {

// Relative size below which the leading coefficient is treated as zero.
constexpr double kDegenerateTol = 1e-12;

bool cholesky(const SymMatrix& m, Eigen::LLT<Matrix>& llt) {
  if (m.rows() != m.cols() || m.rows() == 0 || !m.allFinite()) return false;
  llt.compute(m);
  return llt.info() == Eigen::Success;
}

}  // namespace

double log_det_pd(const SymMatrix& m) {
  Eigen::LLT<Matrix> llt;
  if (!cholesky(m, llt)) {
    throw NotPositiveDefinite("log_det_pd: matrix is not positive definite");
  }
  const auto diag = llt.matrixLLT().diagonal();
  double acc = 0.0;
  for (Index k = 0; k < diag.size(); ++k) acc += std::log(diag(k));
  return 2.0 * acc;
}

bool is_pd(const SymMatrix& m, double margin) noexcept {
  Eigen::LLT<Matrix> llt;
  if (!cholesky(m, llt)) return false;
  const auto diag = llt.matrixLLT().diagonal();
  for (Index k = 0; k < diag.size(); ++k) {
    if (!(diag(k) * diag(k) > margin)) return false;
  }
  return true;
}

double det_lu(const Matrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("det_lu: matrix is not square");
  return Eigen::PartialPivLU<Matrix>(m).determinant();
}

DetQuadratic det_quadratic(const SymMatrix& c, Index i, Index j) {
  if (i == j) throw std::invalid_argument("det_quadratic: i == j");
  Matrix probe = c;
  auto eval = [&](double x) {
    probe(i, j) = x;
    probe(j, i) = x;
    return det_lu(probe);
  };
  const double fm = eval(-0.5);
  const double f0 = eval(0.0);
  const double fp = eval(0.5);
  // Vandermonde solve on the symmetric probe points.
  DetQuadratic q;
  q.constant = f0;
  q.lin = fp - fm;
  q.quad = 2.0 * (fp + fm - 2.0 * f0);
  return q;
}

PdInterval pd_interval(const DetQuadratic& f, std::optional<double> current) {
  const double d = f.quad;
  const double e = f.lin;
  const double g = f.constant;
  const double scale = std::max({std::abs(d), std::abs(e), std::abs(g)});
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw NoValidInterval("pd_interval: determinant vanishes identically");
  }

  auto finish = [](double lo, double hi) {
    lo = std::max(-1.0, lo);
    hi = std::min(1.0, hi);
    if (!(lo < hi)) throw NoValidInterval("pd_interval: no positive region inside [-1, 1]");
    return PdInterval{lo, hi};
  };

  if (std::abs(d) <= kDegenerateTol * scale) {
    if (std::abs(e) <= kDegenerateTol * scale) {
      if (g > 0.0) return PdInterval{-1.0, 1.0};
      throw NoValidInterval("pd_interval: constant nonpositive determinant");
    }
    const double root = -g / e;
    return e > 0.0 ? finish(root, 1.0) : finish(-1.0, root);
  }

  const double disc = e * e - 4.0 * d * g;
  if (d < 0.0) {
    if (!(disc > 0.0)) throw NoValidInterval("pd_interval: determinant never positive");
    const double sq = std::sqrt(disc);
    const double qq = -0.5 * (e + std::copysign(sq, e));
    double r1 = qq / d;
    double r2 = qq != 0.0 ? g / qq : -r1;
    if (r1 > r2) std::swap(r1, r2);
    return finish(r1, r2);
  }

  // Upward parabola: {f > 0} has up to two components.
  if (!(disc > 0.0)) return PdInterval{-1.0, 1.0};
  const double sq = std::sqrt(disc);
  const double qq = -0.5 * (e + std::copysign(sq, e));
  double u = qq / d;
  double v = qq != 0.0 ? g / qq : -u;
  if (u > v) std::swap(u, v);
  const PdInterval left{-1.0, std::min(1.0, u)};
  const PdInterval right{std::max(-1.0, v), 1.0};
  const bool left_ok = left.lo < left.hi;
  const bool right_ok = right.lo < right.hi;
  if (!left_ok && !right_ok) throw NoValidInterval("pd_interval: no positive region inside [-1, 1]");
  if (!left_ok) return right;
  if (!right_ok) return left;
  if (current) {
    if (*current < u) return left;
    if (*current > v) return right;
  }
  return left.width() >= right.width() ? left : right;
}

PdInterval pd_interval(const SymMatrix& c, Index i, Index j, std::optional<double> current) {
  return pd_interval(det_quadratic(c, i, j), current);
}

PdInterval shrink(const PdInterval& iv, double eps) {
  if (iv.width() <= 2.0 * eps) {
    const double mid = 0.5 * (iv.lo + iv.hi);
    return PdInterval{mid, mid};
  }
  return PdInterval{iv.lo + eps, iv.hi - eps};
}

SymMatrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

SymMatrix to_correlation(const SymMatrix& m) {
  const Vector inv_sd = m.diagonal().array().sqrt().inverse();
  SymMatrix out = inv_sd.asDiagonal() * m * inv_sd.asDiagonal();
  out.diagonal().setOnes();
  return symmetrize(out);
}

SymMatrix inverse_pd(const SymMatrix& m) {
  Eigen::LLT<Matrix> llt;
  if (!cholesky(m, llt)) throw NotPositiveDefinite("inverse_pd: matrix is not positive definite");
  return symmetrize(llt.solve(Matrix::Identity(m.rows(), m.cols())));
}

}  // namespace lassoggm
