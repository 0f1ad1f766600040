#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace lassoggm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Symmetric dense matrix. Symmetry is a documented precondition, not enforced
// by the type.
using SymMatrix = Eigen::MatrixXd;

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotPositiveDefinite : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NoValidInterval : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class ZeroMass : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class EmptyTable : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class GraphUnvisited : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lassoggm
