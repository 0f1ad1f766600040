#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lassoggm/linalg.hpp"
#include "lassoggm/types.hpp"

namespace lassoggm {

using Adjacency = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic>;

/// '0'/'1' string over the strict upper triangle in row-major order.
using GraphKey = std::string;

/// Omega = S (A o R) S with S diagonal, A a 0/1 selection matrix and R the
/// shrinkage matrix. A and R carry unit diagonals.
struct PrecisionDecomposition {
  Vector s;
  Adjacency a;
  Matrix r;

  static PrecisionDecomposition identity(Index p);

  Index dim() const noexcept { return s.size(); }
  SymMatrix correlation() const;
  SymMatrix precision() const;
};

GraphKey graph_key(const Adjacency& a);
Adjacency adjacency_from_key(const GraphKey& key, Index p);

struct GgmChainState {
  PrecisionDecomposition decomp;
  Matrix tau;  // off-diagonal entries are used
  Matrix q;    // off-diagonal entries are used
  double sigma2 = 1.0;

  Index dim() const noexcept { return decomp.dim(); }
};

/// Prior constants for one graphical model: IG(tau_shape, tau_scale) on every
/// tau_ij, Beta(q_a, q_b) on every q_ij, IG(s_shape, s_scale) on every S_i and
/// IG(sigma_shape, sigma_scale) on sigma^2.
struct GgmPrior {
  double tau_shape = 2.0;
  double tau_scale = 0.5;
  double q_a = 1.0;
  double q_b = 1.0;
  double s_shape = 2.0;
  double s_scale = 1.0;
  double sigma_shape = 2.0;
  double sigma_scale = 1.0;
};

struct Hyperparameters {
  double e = 2.0;
  double f = 0.5;
  double a = 1.0;
  double b = 1.0;
  double g = 2.0;
  double h = 1.0;
  double k = 2.0;
  double l = 1.0;

  // Finite mixture block. Unset values resolve to alpha = 1, nu0 = p + 2,
  // B0 = I.
  std::optional<Vector> alpha;
  std::optional<double> nu0;
  std::optional<SymMatrix> b0;

  // Dirichlet process block.
  double dp_alpha = 1.0;
  double nu_e = 2.0;
  double nu_f = 0.5;
  double nu_c = 1.0;
  double nu_d = 1.0;
  double nu_alpha = 2.0;
  double nu_beta = 1.0;

  GgmPrior ggm() const;
  GgmPrior dp_base() const;

  Vector mixture_alpha(Index k) const;
  double mixture_nu0(Index p) const;
  SymMatrix mixture_b0(Index p) const;

  /// Throws std::invalid_argument when a constant is out of range.
  void validate(Index p) const;
};

/// Variables in rows, samples in columns.
struct DataMatrix {
  Matrix y;

  Index p() const noexcept { return y.rows(); }
  Index n() const noexcept { return y.cols(); }

  /// Builds from a samples-by-variables array (rows are samples).
  static DataMatrix from_samples(const Matrix& rows);

  Vector mean() const;
  DataMatrix centered() const;
  DataMatrix columns(const std::vector<Index>& idx) const;
};

/// Scatter matrix sum_i y_i y_i^T and the number of samples behind it.
struct SuffStats {
  SymMatrix scatter;
  double n = 0.0;

  static SuffStats of(const DataMatrix& y);
  static SuffStats of(const DataMatrix& y, const Vector& center);
  static SuffStats empty(Index p);
};

/// -(np/2) log(2 pi sigma^2) + (n/2) log|Omega| - tr(Omega Y Y^T) / (2 sigma^2).
double log_likelihood(const DataMatrix& y, const GgmChainState& state);
double log_likelihood(const SuffStats& stats, const GgmChainState& state);

/// -log(2 tau) - |r| / tau.
double log_laplace_prior(double r, double tau);

/// W(u, v) = sgn(v)(1 - exp(-|v|/tau)) - sgn(u)(1 - exp(-|u|/tau)).
double laplace_window(double u, double v, double tau);

/// Inverse of the normalizing constant of the joint (A_ij, R_ij) prior under
/// the positive-definite truncation:
///   (1-q)/2 (v-u)/tau 1[0 in [u,v]] + q/2 W(u,v).
double truncation_constant_inverse(double tau, double q, const PdInterval& interval);

/// K(tau, q). Throws ZeroMass when the inverse vanishes.
double truncation_constant(double tau, double q, const PdInterval& interval);

struct GridSpec {
  int points = 100;
  double eps = 1e-8;
};

/// Unnormalized joint conditional of (A_ij, R_ij) on the log scale.
///
/// The absent row (A_ij = 0) is a single atom carrying the full truncated
/// Laplace mass on [-1, 1]; it is -inf when 0 lies outside the interval. The
/// present row is evaluated on `points` equispaced values spanning the
/// eps-shrunk interval, each weighted by its trapezoid cell width.
struct EdgeTable {
  PdInterval interval;
  double absent_log_weight = 0.0;
  std::vector<double> grid;
  std::vector<double> present_log_weight;

  /// [P(A=0), P(A=1, r_1), ..., P(A=1, r_G)] normalized to sum to one.
  /// Throws EmptyTable when every weight is zero.
  Vector probabilities() const;
};

EdgeTable edge_table(const DataMatrix& y, const GgmChainState& state, Index i, Index j,
                     const GridSpec& grid = {});

/// Lower-level form: `det` is the determinant of A o R as a quadratic in the
/// (i, j) entry and `interval` the matching PD interval.
EdgeTable edge_table(const SuffStats& stats, const GgmChainState& state, Index i, Index j,
                     const DetQuadratic& det, const PdInterval& interval, const GridSpec& grid);

}  // namespace lassoggm
