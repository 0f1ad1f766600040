#include "lassoggm/partition.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>

namespace lassoggm {

SymMatrix co_clustering(const std::vector<Partition>& draws) {
  if (draws.empty()) throw std::invalid_argument("co_clustering: no partitions");
  const Index n = static_cast<Index>(draws.front().size());
  SymMatrix co = SymMatrix::Zero(n, n);
  for (const auto& z : draws) {
    if (static_cast<Index>(z.size()) != n) throw std::invalid_argument("co_clustering: size mismatch");
    for (Index i = 0; i < n; ++i) {
      for (Index j = i; j < n; ++j) {
        if (z[static_cast<std::size_t>(i)] == z[static_cast<std::size_t>(j)]) co(i, j) += 1.0;
      }
    }
  }
  co /= static_cast<double>(draws.size());
  return co.selfadjointView<Eigen::Upper>();
}

double binder_loss(const Partition& z, const SymMatrix& co) {
  double loss = 0.0;
  const Index n = co.rows();
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      const double same = z[static_cast<std::size_t>(i)] == z[static_cast<std::size_t>(j)] ? 1.0 : 0.0;
      loss += std::abs(same - co(i, j));
    }
  }
  return loss;
}

Partition binder_point_partition(const std::vector<Partition>& draws, const SymMatrix& co) {
  if (draws.empty()) throw std::invalid_argument("binder_point_partition: no partitions");
  double best = std::numeric_limits<double>::infinity();
  const Partition* pick = &draws.front();
  for (const auto& z : draws) {
    const double l = binder_loss(z, co);
    if (l < best) {
      best = l;
      pick = &z;
    }
  }
  return relabel_by_size(*pick);
}

Partition relabel_by_size(const Partition& z) {
  std::map<int, std::pair<int, std::size_t>> info;  // label -> (size, first member)
  for (std::size_t i = 0; i < z.size(); ++i) {
    auto it = info.find(z[i]);
    if (it == info.end()) info.emplace(z[i], std::pair{1, i});
    else ++it->second.first;
  }
  std::vector<std::pair<int, std::pair<int, std::size_t>>> order(info.begin(), info.end());
  std::sort(order.begin(), order.end(), [](const auto& x, const auto& y) {
    if (x.second.first != y.second.first) return x.second.first > y.second.first;
    return x.second.second < y.second.second;
  });
  std::map<int, int> rename;
  for (std::size_t k = 0; k < order.size(); ++k) rename[order[k].first] = static_cast<int>(k);
  Partition out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) out[i] = rename[z[i]];
  return out;
}

int cluster_count(const Partition& z) {
  return static_cast<int>(std::set<int>(z.begin(), z.end()).size());
}

}  // namespace lassoggm
