#pragma once

#include <cstdint>
#include <random>
#include <span>

#include "lassoggm/types.hpp"

namespace lassoggm {

/// Seeded 64-bit generator. Independent substreams are derived by hashing
/// (seed, stream id), so replicate chains can run on separate threads
/// without sharing state.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  Rng substream(std::uint64_t id) const { return Rng(seed_, mix(stream_, id)); }

  std::uint64_t seed() const noexcept { return seed_; }
  std::mt19937_64& engine() noexcept { return engine_; }

  /// Uniform on the open interval (0, 1).
  double uniform();
  double normal();
  double gamma(double shape, double scale);
  double inv_gamma(double shape, double scale);
  double beta(double a, double b);
  /// Uniform integer in [0, n).
  std::size_t index(std::size_t n);

 private:
  static std::uint64_t mix(std::uint64_t a, std::uint64_t b);

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

Vector dirichlet(Rng& rng, const Vector& alpha);

/// Draw from N(mean, precision^{-1}) by back-substitution on the Cholesky
/// factor of the precision.
Vector mvn_from_precision(Rng& rng, const Vector& mean, const SymMatrix& precision);

Vector mvn_from_covariance(Rng& rng, const Vector& mean, const SymMatrix& cov);

/// Wishart(dof, scale) by the Bartlett decomposition.
SymMatrix wishart(Rng& rng, double dof, const SymMatrix& scale);

/// Inverse Wishart with density proportional to |B|^{-(dof+p+1)/2} exp(-tr(scale B^{-1})/2).
SymMatrix inverse_wishart(Rng& rng, double dof, const SymMatrix& scale);

/// Laplace(0, tau) restricted to [lo, hi], by inverse CDF.
double truncated_laplace(Rng& rng, double tau, double lo, double hi);

/// Index drawn with probability proportional to exp(log_weights).
/// Entries equal to -inf carry zero mass. Throws EmptyTable when all do.
std::size_t sample_log_weights(Rng& rng, std::span<const double> log_weights);

/// log(sum(exp(x))) with the usual max shift.
double log_sum_exp(std::span<const double> x);

}  // namespace lassoggm
