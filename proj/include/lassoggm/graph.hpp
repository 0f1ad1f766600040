#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "lassoggm/model.hpp"
#include "lassoggm/sampler.hpp"

namespace lassoggm {

struct GraphPosterior {
  Index dim = 0;
  std::map<GraphKey, std::size_t> visit_counts;
  SymMatrix edge_marginals;
  std::size_t total = 0;

  double probability(const GraphKey& key) const;
};

/// Throws std::invalid_argument on an empty chain.
GraphPosterior tally(const std::vector<GraphKey>& keys, Index p);
GraphPosterior tally(const ChainOutput& chain);

using RankedGraph = std::pair<GraphKey, double>;

/// Probability descending, key ascending. Returns every visited graph when
/// k exceeds their number.
std::vector<RankedGraph> top_k(const GraphPosterior& post, std::size_t k);

/// Edges with marginal inclusion >= 0.5.
Adjacency median_probability_graph(const SymMatrix& edge_marginals);

/// Mean of Omega / sigma^2 over retained states whose graph is `key`.
/// Throws GraphUnvisited.
SymMatrix graph_mean_precision(const ChainOutput& chain, const GraphKey& key);

/// Mean of A o R over retained states whose graph is `key`.
SymMatrix graph_mean_correlation(const ChainOutput& chain, const GraphKey& key);

/// E[y_j | rest] = mu_j - (1/Omega_jj) sum_{m != j} Omega_jm (y_m - mu_m),
/// for every cell of `test` (variables in rows).
Matrix conditional_predictions(const SymMatrix& omega, const Vector& mu, const Matrix& test);

struct HeldOutPrediction {
  Matrix predictions;  // p x n_test
  double pse = 0.0;
  std::vector<RankedGraph> graphs;
};

/// Equal-weight average of per-graph conditional predictions over the k most
/// visited graphs. The chain is assumed fit on the training data centered at
/// its mean. Throws GraphUnvisited when k exceeds the visited graph count.
HeldOutPrediction predict_held_out(const DataMatrix& train, const DataMatrix& test,
                                   const ChainOutput& chain, std::size_t k);

/// Undirected DOT graph. Edges are colored by the sign of the partial
/// correlation -C_ij: red when negative, green when positive.
std::string export_graph(const Adjacency& a, const SymMatrix& correlation,
                         const std::vector<std::string>& labels, const std::string& name = "G");

std::vector<std::string> default_labels(Index p);

}  // namespace lassoggm
