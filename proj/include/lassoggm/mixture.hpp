#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lassoggm/model.hpp"
#include "lassoggm/partition.hpp"
#include "lassoggm/random.hpp"
#include "lassoggm/sampler.hpp"

namespace lassoggm {

/// Labels are 0-based cluster indices.
struct MixtureState {
  int k = 0;
  Partition labels;
  Vector weights;
  std::vector<Vector> means;
  SymMatrix b;
  std::vector<GgmChainState> components;
};

/// Lloyd iterations from k-means++ seeding. Columns of `points` are samples.
Partition kmeans(const Matrix& points, int k, Rng& rng, int iterations = 50);

/// log N(y; theta, omega^{-1}) for every column of y.
Vector log_normal_density(const Matrix& y, const Vector& theta, const SymMatrix& omega);

void update_weights(MixtureState& st, const Vector& alpha, Rng& rng);
void update_labels(MixtureState& st, const DataMatrix& y, Rng& rng);
void update_means(MixtureState& st, const DataMatrix& y, Rng& rng);
void update_b(MixtureState& st, double nu0, const SymMatrix& b0, Rng& rng);
void update_components(MixtureState& st, const DataMatrix& y, const GgmPrior& prior,
                       const SweepOptions& opts, Rng& rng, AcceptanceStats& acc);

std::vector<Index> members(const Partition& labels, int cluster);

/// Plug-in parameters of a completed chain.
struct MixturePointEstimate {
  Vector weights;
  std::vector<Vector> means;
  std::vector<SymMatrix> precisions;
  std::vector<Adjacency> graphs;
};

double mixture_log_likelihood(const DataMatrix& y, const MixturePointEstimate& est);

/// Edges plus p scales plus p means per cluster, plus K - 1 weights.
long parameter_count(const MixturePointEstimate& est);

/// -2 L + m ln n.
double bic(const DataMatrix& y, const MixturePointEstimate& est);

struct MixtureFit {
  int k = 0;
  Vector center;  // the data are shifted by this before sampling
  std::vector<Partition> label_draws;
  SymMatrix co_clustering;
  Partition point_partition;
  MixturePointEstimate estimate;  // in the original data coordinates
  std::vector<SymMatrix> edge_marginals;
  std::vector<SymMatrix> mean_correlations;
  double log_likelihood = 0.0;
  long parameters = 0;
  double bic = 0.0;
  AcceptanceStats acceptance;
};

/// Full fixed-K chain. Data are centered at their overall mean first; the
/// reported means are shifted back. Retained draws are aligned to the point
/// partition by maximum label overlap before averaging.
MixtureFit run_mixture_chain(const DataMatrix& y, const Hyperparameters& hp, int k,
                             const McmcConfig& cfg);

struct KSelection {
  int best_k = 0;
  std::vector<int> ks;
  std::vector<std::optional<MixtureFit>> fits;  // empty where the chain failed
  std::vector<std::string> errors;
};

/// One chain per K, run on up to `threads` workers. Ties go to the smaller K.
/// Throws NumericalError only if every K failed.
KSelection select_k(const DataMatrix& y, const Hyperparameters& hp, const McmcConfig& cfg,
                    const std::vector<int>& k_range, int threads = 1);

}  // namespace lassoggm
