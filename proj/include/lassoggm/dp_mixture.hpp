#pragma once

#include <map>
#include <vector>

#include "lassoggm/mixture.hpp"

namespace lassoggm {

struct DpCluster {
  Vector theta;
  GgmChainState ggm;  // sigma^2 stays at 1
  // Cached from ggm; refreshed by refresh().
  SymMatrix omega;
  Eigen::LLT<Matrix> factor;
  double log_det = 0.0;

  void refresh();
  double log_density(const Vector& y) const;
};

struct DpState {
  std::vector<int> assignments;  // cluster ids
  std::map<int, DpCluster> clusters;
  std::map<int, int> sizes;
  int next_id = 0;
  double alpha = 1.0;

  int active() const noexcept { return static_cast<int>(sizes.size()); }
  /// Throws std::logic_error on an orphan or empty cluster.
  void check() const;
};

struct DpOptions {
  int init_clusters = 4;
  /// Replace every density by a constant. Cluster parameters are then never
  /// used, so they are neither drawn nor updated.
  bool ablate_likelihood = false;
  int base_retries = 20;
};

/// tau ~ IG(nu_e, nu_f), q ~ Beta(nu_c, nu_d), S ~ IG(nu_alpha, nu_beta) per
/// entry, then one exact prior-only pass over (A, R) in row-major order,
/// then theta ~ N(0, Omega^{-1}).
DpCluster draw_from_base(const Hyperparameters& hp, Index p, Rng& rng, const GridSpec& grid = {},
                         int retries = 20);

void update_assignment(DpState& st, const DataMatrix& y, Index i, const Hyperparameters& hp,
                       Rng& rng, const DpOptions& opts = {}, const GridSpec& grid = {});

/// One GGM sweep on sum (y - theta)(y - theta)^T + theta theta^T with n_c + 1
/// samples, then theta ~ N(sum y / (n_c + 1), Omega^{-1} / (n_c + 1)).
void update_cluster_params(DpState& st, const DataMatrix& y, const Hyperparameters& hp,
                           const SweepOptions& opts, Rng& rng, AcceptanceStats& acc);

struct DpFit {
  Vector center;
  std::vector<int> d_n;          // per retained draw
  std::map<int, double> d_n_posterior;
  int d_n_mode = 0;
  std::vector<Partition> partitions;
  SymMatrix co_clustering;
  Partition point_partition;
  /// Per point-partition cluster, averaged over the draw cluster holding most
  /// of its members.
  std::vector<SymMatrix> edge_marginals;
  std::vector<SymMatrix> mean_correlations;
  std::vector<Vector> means;  // original coordinates
  AcceptanceStats acceptance;
};

/// Data are centered at their overall mean first.
DpFit run_dp_chain(const DataMatrix& y, const Hyperparameters& hp, const McmcConfig& cfg,
                   const DpOptions& opts = {});

/// sum_{m=1}^{n} alpha / (alpha + m - 1).
double crp_expected_clusters(double alpha, Index n);

}  // namespace lassoggm
