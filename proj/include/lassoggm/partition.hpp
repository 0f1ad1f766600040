#pragma once

#include <vector>

#include "lassoggm/types.hpp"

namespace lassoggm {

using Partition = std::vector<int>;

/// Fraction of partitions placing i and j together.
SymMatrix co_clustering(const std::vector<Partition>& draws);

/// Sum over i < j of |1[z_i = z_j] - P_ij|.
double binder_loss(const Partition& z, const SymMatrix& co);

/// The sampled partition with the smallest Binder loss against the
/// co-clustering matrix. Earliest draw wins ties.
Partition binder_point_partition(const std::vector<Partition>& draws, const SymMatrix& co);

/// Renames clusters 0..K-1 by decreasing size, ties by smallest member.
Partition relabel_by_size(const Partition& z);

int cluster_count(const Partition& z);

}  // namespace lassoggm
