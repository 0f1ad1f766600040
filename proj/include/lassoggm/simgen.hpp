#pragma once

#include <cstdint>
#include <string>

#include "lassoggm/model.hpp"
#include "lassoggm/random.hpp"

namespace lassoggm {

enum class Structure { identity, banded, block, sparse, dense };

Structure parse_structure(const std::string& name);
std::string to_string(Structure s);

struct StructureSpec {
  Structure kind = Structure::banded;
  Index p = 10;
  double pi = 0.1;  // sparse edge probability
  std::uint64_t seed = 1;

  void validate() const;
};

/// Unit-diagonal PD matrix from M = L L^T, L unit lower triangular with
/// standard normal entries below the diagonal.
SymMatrix random_pd_correlation(Index p, Rng& rng);

/// True precision in correlation form.
SymMatrix generate(const StructureSpec& spec);
SymMatrix generate(const StructureSpec& spec, Rng& rng);

/// n independent draws from N(mean, omega^{-1}).
DataMatrix simulate_data(const SymMatrix& omega, Index n, const Vector& mean, Rng& rng);

}  // namespace lassoggm
