#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace lrexp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Largest dimension allowed for any reduced (small dense) object: reduced
/// operators, reduced states, Sylvester solutions and augmented exponentials.
inline constexpr Index kSmallDenseCap = 4096;

/// Relative threshold below which a Gram-Schmidt direction is deflated.
inline constexpr double kDefaultDedupTol = 1e-10;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands whose shapes do not conform.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A small dense object exceeded kSmallDenseCap.
class SizeCapError : public Error {
 public:
  using Error::Error;
};

/// Some eigenvalue sum lambda_i(A) + lambda_j(B) is numerically zero.
class SingularSylvesterError : public Error {
 public:
  using Error::Error;
};

/// (Op - rho I) could not be factorized; usually a pole on the spectrum.
class ShiftedSolveError : public Error {
 public:
  using Error::Error;
};

/// A precondition on a numerical argument does not hold.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An iterative method failed to converge within its budget.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Bad user configuration (unknown names, invalid values).
class ConfigError : public Error {
 public:
  using Error::Error;
};

inline void require_small(Index rows, Index cols, const char* what) {
  if (rows > kSmallDenseCap || cols > kSmallDenseCap) {
    throw SizeCapError(std::string(what) + ": " + std::to_string(rows) + "x" +
                       std::to_string(cols) + " exceeds the small dense cap");
  }
}

inline void require_same_shape(Index r1, Index c1, Index r2, Index c2,
                               const char* what) {
  if (r1 != r2 || c1 != c2) {
    throw DimensionError(std::string(what) + ": shape " + std::to_string(r1) +
                         "x" + std::to_string(c1) + " vs " +
                         std::to_string(r2) + "x" + std::to_string(c2));
  }
}

}  // namespace lrexp
