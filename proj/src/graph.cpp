#include "lassoggm/graph.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "lassoggm/metrics.hpp"

namespace lassoggm {

double GraphPosterior::probability(const GraphKey& key) const {
  const auto it = visit_counts.find(key);
  if (it == visit_counts.end() || total == 0) return 0.0;
  return static_cast<double>(it->second) / static_cast<double>(total);
}

GraphPosterior tally(const std::vector<GraphKey>& keys, Index p) {
  if (keys.empty()) throw std::invalid_argument("tally: empty chain");
  GraphPosterior post;
  post.dim = p;
  post.total = keys.size();
  post.edge_marginals = SymMatrix::Zero(p, p);
  for (const auto& k : keys) ++post.visit_counts[k];
  for (const auto& [key, count] : post.visit_counts) {
    const Adjacency a = adjacency_from_key(key, p);
    post.edge_marginals += static_cast<double>(count) * a.cast<double>();
  }
  post.edge_marginals /= static_cast<double>(post.total);
  post.edge_marginals.diagonal().setZero();
  return post;
}

GraphPosterior tally(const ChainOutput& chain) { return tally(chain.adjacency, chain.dim); }

std::vector<RankedGraph> top_k(const GraphPosterior& post, std::size_t k) {
  if (k == 0) throw std::invalid_argument("top_k: k must be positive");
  std::vector<std::pair<GraphKey, std::size_t>> v(post.visit_counts.begin(),
                                                  post.visit_counts.end());
  // The map is already key-ascending; a stable sort on count keeps that order for ties.
  std::stable_sort(v.begin(), v.end(),
                   [](const auto& x, const auto& y) { return x.second > y.second; });
  std::vector<RankedGraph> out;
  for (std::size_t i = 0; i < v.size() && i < k; ++i) {
    out.emplace_back(v[i].first,
                     static_cast<double>(v[i].second) / static_cast<double>(post.total));
  }
  return out;
}

Adjacency median_probability_graph(const SymMatrix& m) {
  const Index p = m.rows();
  Adjacency a = Adjacency::Identity(p, p);
  for (Index i = 0; i < p; ++i) {
    for (Index j = i + 1; j < p; ++j) a(i, j) = a(j, i) = m(i, j) >= 0.5 ? 1 : 0;
  }
  return a;
}

namespace {

template <class F>
SymMatrix graph_average(const ChainOutput& chain, const GraphKey& key, F f) {
  SymMatrix acc = SymMatrix::Zero(chain.dim, chain.dim);
  std::size_t hits = 0;
  for (std::size_t b = 0; b < chain.states.size(); ++b) {
    if (chain.adjacency[b] != key) continue;
    acc += f(chain.states[b]);
    ++hits;
  }
  if (hits == 0) throw GraphUnvisited("graph " + key + " was never visited");
  return acc / static_cast<double>(hits);
}

}  // namespace

SymMatrix graph_mean_precision(const ChainOutput& chain, const GraphKey& key) {
  return graph_average(chain, key, [](const GgmChainState& s) { return effective_precision(s); });
}

SymMatrix graph_mean_correlation(const ChainOutput& chain, const GraphKey& key) {
  return graph_average(chain, key,
                       [](const GgmChainState& s) { return s.decomp.correlation(); });
}

Matrix conditional_predictions(const SymMatrix& omega, const Vector& mu, const Matrix& test) {
  const Index p = omega.rows();
  if (test.rows() != p || mu.size() != p) {
    throw std::invalid_argument("conditional_predictions: dimension mismatch");
  }
  const Matrix d = test.colwise() - mu;
  // Row j of Omega d includes the diagonal term Omega_jj d_j, removed below.
  const Matrix od = omega * d;
  Matrix out(p, test.cols());
  for (Index j = 0; j < p; ++j) {
    out.row(j) = (mu(j) - ((od.row(j) - omega(j, j) * d.row(j)) / omega(j, j)).array()).matrix();
  }
  return out;
}

HeldOutPrediction predict_held_out(const DataMatrix& train, const DataMatrix& test,
                                   const ChainOutput& chain, std::size_t k) {
  if (train.p() != test.p() || train.p() != chain.dim) {
    throw std::invalid_argument("predict_held_out: train, test and chain dimensions differ");
  }
  const GraphPosterior post = tally(chain);
  HeldOutPrediction out;
  out.graphs = top_k(post, k);
  if (out.graphs.size() < k) {
    throw GraphUnvisited("predict_held_out: requested " + std::to_string(k) + " graphs but only " +
                         std::to_string(out.graphs.size()) + " were visited");
  }
  const Vector mu = train.mean();
  out.predictions = Matrix::Zero(test.p(), test.n());
  for (const auto& [key, prob] : out.graphs) {
    out.predictions += conditional_predictions(graph_mean_precision(chain, key), mu, test.y);
  }
  out.predictions /= static_cast<double>(k);
  out.pse = predictive_squared_error(out.predictions, test.y);
  return out;
}

std::vector<std::string> default_labels(Index p) {
  std::vector<std::string> v;
  for (Index i = 0; i < p; ++i) v.push_back("X" + std::to_string(i + 1));
  return v;
}

std::string export_graph(const Adjacency& a, const SymMatrix& correlation,
                         const std::vector<std::string>& labels, const std::string& name) {
  const Index p = a.rows();
  if (static_cast<Index>(labels.size()) != p) {
    throw std::invalid_argument("export_graph: label count does not match dimension");
  }
  auto quote = [](const std::string& s) {
    std::string q = "\"";
    for (char ch : s) {
      if (ch == '"' || ch == '\\') q.push_back('\\');
      q.push_back(ch);
    }
    return q + "\"";
  };
  std::ostringstream os;
  os << "graph " << quote(name) << " {\n";
  for (Index i = 0; i < p; ++i) os << "  " << quote(labels[static_cast<std::size_t>(i)]) << ";\n";
  for (Index i = 0; i < p; ++i) {
    for (Index j = i + 1; j < p; ++j) {
      if (a(i, j) == 0) continue;
      const double rho = -correlation(i, j);
      os << "  " << quote(labels[static_cast<std::size_t>(i)]) << " -- "
         << quote(labels[static_cast<std::size_t>(j)]) << " [color=" << (rho < 0.0 ? "red" : "green")
         << "];\n";
    }
  }
  os << "}\n";
  return os.str();
}

}  // namespace lassoggm
