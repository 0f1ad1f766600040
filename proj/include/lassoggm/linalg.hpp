#pragma once

#include <optional>

#include "lassoggm/types.hpp"

namespace lassoggm {

/// Log determinant through a Cholesky factorization.
/// Throws NotPositiveDefinite if a pivot is not strictly positive.
double log_det_pd(const SymMatrix& m);

/// True iff the Cholesky factorization succeeds with every pivot > margin.
bool is_pd(const SymMatrix& m, double margin = 0.0) noexcept;

/// Determinant of a general square matrix via LU with partial pivoting.
double det_lu(const Matrix& m);

/// Coefficients of det(C with C_ij = C_ji = x) = quad * x^2 + lin * x + constant.
struct DetQuadratic {
  double quad = 0.0;
  double lin = 0.0;
  double constant = 0.0;

  double operator()(double x) const noexcept { return (quad * x + lin) * x + constant; }
};

/// Interpolates the determinant at x in {-1/2, 0, 1/2}.
DetQuadratic det_quadratic(const SymMatrix& c, Index i, Index j);

struct PdInterval {
  double lo = -1.0;
  double hi = 1.0;

  bool contains(double x) const noexcept { return lo <= x && x <= hi; }
  double width() const noexcept { return hi - lo; }
};

/// Range of values for the (i, j) entry of a unit-diagonal matrix c that keep
/// it positive definite, clipped to [-1, 1].
///
/// `current` selects the connected component of {det > 0} when the quadratic
/// opens upward; without it the widest component inside [-1, 1] is used.
/// Throws NoValidInterval if det <= 0 on all of [-1, 1].
PdInterval pd_interval(const SymMatrix& c, Index i, Index j,
                       std::optional<double> current = std::nullopt);

/// Same as above, reusing already interpolated coefficients.
PdInterval pd_interval(const DetQuadratic& f, std::optional<double> current = std::nullopt);

/// Clips an interval inward by eps on each side. Collapses to the midpoint
/// when narrower than 2 * eps.
PdInterval shrink(const PdInterval& iv, double eps);

/// Entrywise symmetric part, (m + m^T) / 2.
SymMatrix symmetrize(const Matrix& m);

/// Rescales a PD matrix to unit diagonal: D^{-1/2} m D^{-1/2}.
SymMatrix to_correlation(const SymMatrix& m);

/// Inverse of a PD matrix via Cholesky. Throws NotPositiveDefinite.
SymMatrix inverse_pd(const SymMatrix& m);

}  // namespace lassoggm
