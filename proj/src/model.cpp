#include "lassoggm/model.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "lassoggm/random.hpp"

namespace lassoggm {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double sgn(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }
}  // namespace

PrecisionDecomposition PrecisionDecomposition::identity(Index p) {
  PrecisionDecomposition d;
  d.s = Vector::Ones(p);
  d.a = Adjacency::Identity(p, p);
  d.r = Matrix::Identity(p, p);
  return d;
}

GraphKey graph_key(const Adjacency& a) {
  GraphKey key;
  const Index p = a.rows();
  key.reserve(static_cast<std::size_t>(p * (p - 1) / 2));
  for (Index i = 0; i < p; ++i) {
    for (Index j = i + 1; j < p; ++j) key.push_back(a(i, j) != 0 ? '1' : '0');
  }
  return key;
}

Adjacency adjacency_from_key(const GraphKey& key, Index p) {
  if (static_cast<Index>(key.size()) != p * (p - 1) / 2) {
    throw std::invalid_argument("adjacency_from_key: key length does not match dimension");
  }
  Adjacency a = Adjacency::Identity(p, p);
  std::size_t pos = 0;
  for (Index i = 0; i < p; ++i) {
    for (Index j = i + 1; j < p; ++j) {
      const char ch = key[pos++];
      if (ch != '0' && ch != '1') throw std::invalid_argument("adjacency_from_key: bad character");
      a(i, j) = a(j, i) = ch == '1' ? 1 : 0;
    }
  }
  return a;
}

SymMatrix PrecisionDecomposition::correlation() const {
  SymMatrix c = a.cast<double>().cwiseProduct(r);
  c.diagonal().setOnes();
  return c;
}

SymMatrix PrecisionDecomposition::precision() const {
  return s.asDiagonal() * correlation() * s.asDiagonal();
}

GgmPrior Hyperparameters::ggm() const { return GgmPrior{e, f, a, b, g, h, k, l}; }

GgmPrior Hyperparameters::dp_base() const {
  return GgmPrior{nu_e, nu_f, nu_c, nu_d, nu_alpha, nu_beta, k, l};
}

Vector Hyperparameters::mixture_alpha(Index k_clusters) const {
  if (!alpha) return Vector::Ones(k_clusters);
  if (alpha->size() == 1) return Vector::Constant(k_clusters, (*alpha)(0));
  if (alpha->size() != k_clusters) {
    throw std::invalid_argument("hyperparameters: alpha has " + std::to_string(alpha->size()) +
                                " entries, expected " + std::to_string(k_clusters));
  }
  return *alpha;
}

double Hyperparameters::mixture_nu0(Index p) const {
  return nu0 ? *nu0 : static_cast<double>(p) + 2.0;
}

SymMatrix Hyperparameters::mixture_b0(Index p) const {
  return b0 ? *b0 : SymMatrix(SymMatrix::Identity(p, p));
}

void Hyperparameters::validate(Index p) const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument(std::string("hyperparameters: ") + name + " must be positive");
    }
  };
  positive(e, "e");
  positive(f, "f");
  positive(a, "a");
  positive(b, "b");
  positive(g, "g");
  positive(h, "h");
  positive(k, "k");
  positive(l, "l");
  positive(dp_alpha, "dp_alpha");
  positive(nu_e, "nu_e");
  positive(nu_f, "nu_f");
  positive(nu_c, "nu_c");
  positive(nu_d, "nu_d");
  positive(nu_alpha, "nu_alpha");
  positive(nu_beta, "nu_beta");
  if (alpha && !(alpha->array() > 0.0).all()) {
    throw std::invalid_argument("hyperparameters: alpha entries must be positive");
  }
  if (!(mixture_nu0(p) > static_cast<double>(p) - 1.0)) {
    throw std::invalid_argument("hyperparameters: nu0 must exceed p - 1");
  }
  if (b0 && (b0->rows() != p || !is_pd(*b0))) {
    throw std::invalid_argument("hyperparameters: B0 must be a p x p positive definite matrix");
  }
}

DataMatrix DataMatrix::from_samples(const Matrix& rows) { return DataMatrix{rows.transpose()}; }

Vector DataMatrix::mean() const {
  if (n() == 0) return Vector::Zero(p());
  return y.rowwise().mean();
}

DataMatrix DataMatrix::centered() const { return DataMatrix{y.colwise() - mean()}; }

DataMatrix DataMatrix::columns(const std::vector<Index>& idx) const {
  DataMatrix out{Matrix(p(), static_cast<Index>(idx.size()))};
  for (std::size_t k = 0; k < idx.size(); ++k) out.y.col(static_cast<Index>(k)) = y.col(idx[k]);
  return out;
}

SuffStats SuffStats::of(const DataMatrix& y) {
  return SuffStats{symmetrize(y.y * y.y.transpose()), static_cast<double>(y.n())};
}

SuffStats SuffStats::of(const DataMatrix& y, const Vector& center) {
  const Matrix d = y.y.colwise() - center;
  return SuffStats{symmetrize(d * d.transpose()), static_cast<double>(y.n())};
}

SuffStats SuffStats::empty(Index p) { return SuffStats{SymMatrix::Zero(p, p), 0.0}; }

double log_likelihood(const SuffStats& stats, const GgmChainState& state) {
  const SymMatrix omega = state.decomp.precision();
  const double p = static_cast<double>(state.dim());
  const double n = stats.n;
  const double trace = omega.cwiseProduct(stats.scatter).sum();
  return -0.5 * n * p * std::log(2.0 * std::numbers::pi * state.sigma2) +
         0.5 * n * log_det_pd(omega) - trace / (2.0 * state.sigma2);
}

double log_likelihood(const DataMatrix& y, const GgmChainState& state) {
  return log_likelihood(SuffStats::of(y), state);
}

double log_laplace_prior(double r, double tau) { return -std::log(2.0 * tau) - std::abs(r) / tau; }

double laplace_window(double u, double v, double tau) {
  return sgn(v) * -std::expm1(-std::abs(v) / tau) - sgn(u) * -std::expm1(-std::abs(u) / tau);
}

double truncation_constant_inverse(double tau, double q, const PdInterval& interval) {
  const double u = interval.lo;
  const double v = interval.hi;
  const double absent = (u <= 0.0 && 0.0 <= v) ? 0.5 * (1.0 - q) * (v - u) / tau : 0.0;
  const double present = 0.5 * q * laplace_window(u, v, tau);
  return absent + present;
}

double truncation_constant(double tau, double q, const PdInterval& interval) {
  const double inv = truncation_constant_inverse(tau, q, interval);
  if (!(inv > 0.0)) throw ZeroMass("truncation_constant: both branches carry zero mass");
  return 1.0 / inv;
}

Vector EdgeTable::probabilities() const {
  Vector lw(static_cast<Index>(present_log_weight.size()) + 1);
  lw(0) = absent_log_weight;
  for (std::size_t g = 0; g < present_log_weight.size(); ++g) {
    lw(static_cast<Index>(g) + 1) = present_log_weight[g];
  }
  const double mx = lw.maxCoeff();
  if (!std::isfinite(mx)) throw EmptyTable("edge_table: all weights are zero");
  // Scalar exp: the vectorized one maps -inf to a denormal rather than 0.
  Vector w = (lw.array() - mx).unaryExpr([](double x) { return std::exp(x); });
  return w / w.sum();
}

EdgeTable edge_table(const SuffStats& stats, const GgmChainState& state, Index i, Index j,
                     const DetQuadratic& det, const PdInterval& interval, const GridSpec& grid) {
  if (grid.points < 2) throw std::invalid_argument("edge_table: need at least two grid points");
  const double tau = state.tau(i, j);
  const double q = state.q(i, j);
  const double half_n = 0.5 * stats.n;
  const double cross =
      state.decomp.s(i) * state.decomp.s(j) * stats.scatter(i, j) / state.sigma2;

  // Log likelihood as a function of C_ij, up to a constant shared by every cell.
  auto loglik = [&](double x) {
    if (half_n == 0.0) return 0.0;
    const double f = det(x);
    if (!(f > 0.0)) return kNegInf;
    return half_n * std::log(f) - cross * x;
  };

  EdgeTable t;
  t.interval = interval;
  const double log_q = std::log(q);
  const double log_1mq = std::log1p(-q);
  const double log_norm = -std::log(2.0 * tau);

  if (interval.lo < 0.0 && 0.0 < interval.hi) {
    t.absent_log_weight = log_1mq + std::log(-std::expm1(-1.0 / tau)) + loglik(0.0);
  } else {
    t.absent_log_weight = kNegInf;
  }

  const PdInterval inner = shrink(interval, grid.eps);
  if (inner.lo == inner.hi) {
    t.grid.push_back(inner.lo);
    const double cell = interval.width();
    t.present_log_weight.push_back(log_q + log_norm - std::abs(inner.lo) / tau + std::log(cell) +
                                   loglik(inner.lo));
    return t;
  }
  const int g_count = grid.points;
  const double step = inner.width() / static_cast<double>(g_count - 1);
  t.grid.resize(static_cast<std::size_t>(g_count));
  t.present_log_weight.resize(static_cast<std::size_t>(g_count));
  for (int g = 0; g < g_count; ++g) {
    const double x = g == g_count - 1 ? inner.hi : inner.lo + step * g;
    const double cell = (g == 0 || g == g_count - 1) ? 0.5 * step : step;
    t.grid[static_cast<std::size_t>(g)] = x;
    t.present_log_weight[static_cast<std::size_t>(g)] =
        log_q + log_norm - std::abs(x) / tau + std::log(cell) + loglik(x);
  }
  return t;
}

EdgeTable edge_table(const DataMatrix& y, const GgmChainState& state, Index i, Index j,
                     const GridSpec& grid) {
  if (i == j) throw std::invalid_argument("edge_table: i == j");
  const SymMatrix c = state.decomp.correlation();
  const DetQuadratic det = det_quadratic(c, i, j);
  const PdInterval iv = pd_interval(det, c(i, j));
  return edge_table(SuffStats::of(y), state, i, j, det, iv, grid);
}

}  // namespace lassoggm
