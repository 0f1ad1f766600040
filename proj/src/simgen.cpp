#include "lassoggm/simgen.hpp"

#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace lassoggm {

Structure parse_structure(const std::string& name) {
  if (name == "identity") return Structure::identity;
  if (name == "banded") return Structure::banded;
  if (name == "block") return Structure::block;
  if (name == "sparse") return Structure::sparse;
  if (name == "dense") return Structure::dense;
  throw std::invalid_argument("unknown structure '" + name + "'");
}

std::string to_string(Structure s) {
  switch (s) {
    case Structure::identity: return "identity";
    case Structure::banded: return "banded";
    case Structure::block: return "block";
    case Structure::sparse: return "sparse";
    case Structure::dense: return "dense";
  }
  return "unknown";
}

void StructureSpec::validate() const {
  if (p < 2) throw std::invalid_argument("structure: p must be at least 2");
  if (!(pi > 0.0 && pi < 1.0)) throw std::invalid_argument("structure: pi must lie in (0, 1)");
}

SymMatrix random_pd_correlation(Index p, Rng& rng) {
  Matrix l = Matrix::Identity(p, p);
  for (Index i = 1; i < p; ++i) {
    for (Index j = 0; j < i; ++j) l(i, j) = rng.normal();
  }
  return to_correlation(symmetrize(l * l.transpose()));
}

SymMatrix generate(const StructureSpec& spec, Rng& rng) {
  spec.validate();
  const Index p = spec.p;
  switch (spec.kind) {
    case Structure::identity:
      return SymMatrix::Identity(p, p);
    case Structure::banded: {
      SymMatrix m = SymMatrix::Identity(p, p);
      for (Index i = 0; i + 1 < p; ++i) m(i, i + 1) = m(i + 1, i) = 0.5;
      return m;
    }
    case Structure::block: {
      const Index k = 1 + static_cast<Index>(rng.index(static_cast<std::size_t>(p - 1)));
      SymMatrix m = SymMatrix::Zero(p, p);
      m.topLeftCorner(p - k, p - k) = random_pd_correlation(p - k, rng);
      m.bottomRightCorner(k, k) = random_pd_correlation(k, rng);
      return m;
    }
    case Structure::sparse: {
      SymMatrix v = SymMatrix::Zero(p, p);
      for (Index i = 0; i < p; ++i) {
        for (Index j = i + 1; j < p; ++j) {
          if (rng.uniform() < spec.pi) {
            const double mag = 0.5 + 0.5 * rng.uniform();
            v(i, j) = v(j, i) = rng.uniform() < 0.5 ? -mag : mag;
          }
        }
      }
      const double lmin = Eigen::SelfAdjointEigenSolver<Matrix>(v, Eigen::EigenvaluesOnly)
                              .eigenvalues()
                              .minCoeff();
      const double delta = std::max(0.0, -lmin) + 0.1;
      return to_correlation(v + delta * SymMatrix::Identity(p, p));
    }
    case Structure::dense:
      return random_pd_correlation(p, rng);
  }
  throw std::invalid_argument("generate: unknown structure");
}

SymMatrix generate(const StructureSpec& spec) {
  Rng rng(spec.seed);
  return generate(spec, rng);
}

DataMatrix simulate_data(const SymMatrix& omega, Index n, const Vector& mean, Rng& rng) {
  if (mean.size() != omega.rows()) throw std::invalid_argument("simulate_data: mean size mismatch");
  DataMatrix out{Matrix(omega.rows(), n)};
  for (Index i = 0; i < n; ++i) out.y.col(i) = mvn_from_precision(rng, mean, omega);
  return out;
}

}  // namespace lassoggm
