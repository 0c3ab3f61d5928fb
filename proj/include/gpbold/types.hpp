#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace gpbold {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Base class for all gpbold exceptions.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid parameter value or model configuration.
struct ParameterError : Error {
  using Error::Error;
};

/// Dimension mismatch between inputs.
struct ShapeError : Error {
  using Error::Error;
};

/// Factorization failure, divergence, degenerate distribution.
struct NumericalError : Error {
  using Error::Error;
};

/// File or serialization problem.
struct IoError : Error {
  using Error::Error;
};

/// Bad command line or config usage.
struct UsageError : Error {
  using Error::Error;
};

}  // namespace gpbold
