#pragma once

#include <vector>

#include "lassoggm/model.hpp"

namespace lassoggm {

/// tr(Omega Est^{-1}) - log|Omega Est^{-1}| - p. Throws NotPositiveDefinite.
double kl_loss(const SymMatrix& truth, const SymMatrix& est);

/// Counts over the strict upper triangle.
struct ConfusionCounts {
  long tp = 0;
  long tn = 0;
  long fp = 0;
  long fn = 0;

  long total() const noexcept { return tp + tn + fp + fn; }
};

ConfusionCounts confusion(const Adjacency& truth, const Adjacency& est);

/// NaN when the denominator is zero.
double mcc(const ConfusionCounts& c);
double sensitivity(const ConfusionCounts& c);
double specificity(const ConfusionCounts& c);
double false_positive_rate(const ConfusionCounts& c);
double false_negative_rate(const ConfusionCounts& c);

/// Edges of a precision matrix: (i, j) present iff the partial correlation
/// -m_ij / sqrt(m_ii m_jj) exceeds t in absolute value.
Adjacency threshold_edges(const SymMatrix& precision, double t);

/// Edges with nonzero partial correlation.
Adjacency support(const SymMatrix& precision);

SymMatrix partial_correlation(const SymMatrix& precision);

/// Mean squared difference over all cells.
double predictive_squared_error(const Matrix& pred, const Matrix& actual);

double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b);

}  // namespace lassoggm
