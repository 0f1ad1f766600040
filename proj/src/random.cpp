#include "lassoggm/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lassoggm {

std::uint64_t Rng::mix(std::uint64_t a, std::uint64_t b) {
  // splitmix64 finalizer over a combined word
  std::uint64_t z = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream), engine_(mix(seed, stream)) {}

double Rng::uniform() {
  for (;;) {
    const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    if (u > 0.0) return u;
  }
}

double Rng::normal() { return normal_(engine_); }

double Rng::gamma(double shape, double scale) {
  std::gamma_distribution<double> dist(shape, scale);
  return dist(engine_);
}

double Rng::inv_gamma(double shape, double scale) {
  // IG(shape, scale) is 1 / Gamma(shape, rate = scale).
  return 1.0 / gamma(shape, 1.0 / scale);
}

double Rng::beta(double a, double b) {
  const double x = gamma(a, 1.0);
  const double y = gamma(b, 1.0);
  return x / (x + y);
}

std::size_t Rng::index(std::size_t n) {
  std::uniform_int_distribution<std::size_t> dist(0, n - 1);
  return dist(engine_);
}

Vector dirichlet(Rng& rng, const Vector& alpha) {
  Vector out(alpha.size());
  for (Index k = 0; k < alpha.size(); ++k) out(k) = rng.gamma(alpha(k), 1.0);
  return out / out.sum();
}

Vector mvn_from_precision(Rng& rng, const Vector& mean, const SymMatrix& precision) {
  Eigen::LLT<Matrix> llt(precision);
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite("mvn_from_precision: precision is not positive definite");
  }
  Vector z(mean.size());
  for (Index k = 0; k < z.size(); ++k) z(k) = rng.normal();
  // precision = L L^T, so L^{-T} z has covariance precision^{-1}.
  return mean + llt.matrixU().solve(z);
}

Vector mvn_from_covariance(Rng& rng, const Vector& mean, const SymMatrix& cov) {
  Eigen::LLT<Matrix> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite("mvn_from_covariance: covariance is not positive definite");
  }
  Vector z(mean.size());
  for (Index k = 0; k < z.size(); ++k) z(k) = rng.normal();
  return mean + llt.matrixL() * z;
}

SymMatrix wishart(Rng& rng, double dof, const SymMatrix& scale) {
  const Index p = scale.rows();
  if (!(dof > static_cast<double>(p) - 1.0)) throw std::invalid_argument("wishart: dof <= p - 1");
  Eigen::LLT<Matrix> llt(scale);
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite("wishart: scale is not positive definite");
  Matrix a = Matrix::Zero(p, p);
  for (Index i = 0; i < p; ++i) {
    a(i, i) = std::sqrt(2.0 * rng.gamma(0.5 * (dof - static_cast<double>(i)), 1.0));
    for (Index j = 0; j < i; ++j) a(i, j) = rng.normal();
  }
  const Matrix la = llt.matrixL() * a;
  return 0.5 * (la * la.transpose() + (la * la.transpose()).transpose());
}

SymMatrix inverse_wishart(Rng& rng, double dof, const SymMatrix& scale) {
  Eigen::LLT<Matrix> llt(scale);
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite("inverse_wishart: scale is not positive definite");
  }
  const Matrix scale_inv = llt.solve(Matrix::Identity(scale.rows(), scale.cols()));
  const Matrix w = wishart(rng, dof, 0.5 * (scale_inv + scale_inv.transpose()));
  Eigen::LLT<Matrix> wl(w);
  const Matrix inv = wl.solve(Matrix::Identity(w.rows(), w.cols()));
  return 0.5 * (inv + inv.transpose());
}

double truncated_laplace(Rng& rng, double tau, double lo, double hi) {
  auto cdf = [tau](double x) {
    return x < 0.0 ? 0.5 * std::exp(x / tau) : 1.0 - 0.5 * std::exp(-x / tau);
  };
  const double flo = cdf(lo);
  const double fhi = cdf(hi);
  const double u = flo + rng.uniform() * (fhi - flo);
  const double x = u < 0.5 ? tau * std::log(2.0 * u) : -tau * std::log(2.0 * (1.0 - u));
  return std::clamp(x, lo, hi);
}

double log_sum_exp(std::span<const double> x) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double v : x) mx = std::max(mx, v);
  if (!std::isfinite(mx)) return mx;
  double acc = 0.0;
  for (double v : x) acc += std::exp(v - mx);
  return mx + std::log(acc);
}

std::size_t sample_log_weights(Rng& rng, std::span<const double> log_weights) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double v : log_weights) {
    if (!std::isnan(v)) mx = std::max(mx, v);
  }
  if (!std::isfinite(mx)) throw EmptyTable("sample_log_weights: all weights are zero");
  double total = 0.0;
  for (double v : log_weights) total += std::isnan(v) ? 0.0 : std::exp(v - mx);
  const double target = rng.uniform() * total;
  double acc = 0.0;
  std::size_t last = 0;
  for (std::size_t k = 0; k < log_weights.size(); ++k) {
    const double v = log_weights[k];
    if (std::isnan(v) || v == -std::numeric_limits<double>::infinity()) continue;
    acc += std::exp(v - mx);
    last = k;
    if (target < acc) return k;
  }
  return last;
}

}  // namespace lassoggm
