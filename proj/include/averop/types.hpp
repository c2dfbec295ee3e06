#pragma once

#include <Eigen/Dense>

#include <limits>
#include <stdexcept>
#include <string>

namespace averop {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Error taxonomy. The CLI maps these onto exit codes:
// ParseError -> 2, ValidationError -> 3, NumericalError -> 4.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : Error {
  using Error::Error;
};
struct ValidationError : Error {
  using Error::Error;
};
struct NumericalError : Error {
  using Error::Error;
};

struct DimensionMismatch : ValidationError {
  using ValidationError::ValidationError;
};
struct NotNonexpansive : ValidationError {
  using ValidationError::ValidationError;
};
struct UnsupportedFunction : ValidationError {
  using ValidationError::ValidationError;
};
struct DegeneratePair : ValidationError {
  using ValidationError::ValidationError;
};
struct FixSetMismatch : ValidationError {
  using ValidationError::ValidationError;
};

struct NonConvergence : NumericalError {
  using NumericalError::NumericalError;
};
struct MaxIterExceeded : NumericalError {
  using NumericalError::NumericalError;
};
struct NotNormallyNonexpansive : NumericalError {
  using NumericalError::NumericalError;
};
struct AllPairsDegenerate : NumericalError {
  using NumericalError::NumericalError;
};

// A claimed two-sided bound failed on a concrete pair.
struct ViolationFound : NumericalError {
  ViolationFound(const std::string& what, Vector x_, Vector y_, double ratio_)
      : NumericalError(what), x(std::move(x_)), y(std::move(y_)), ratio(ratio_) {}
  Vector x, y;
  double ratio;
};

void require_finite(const Vector& v, const char* what);
void require_finite(const Matrix& m, const char* what);
void require_dim(const Vector& v, Eigen::Index dim, const char* what);

}  // namespace averop
