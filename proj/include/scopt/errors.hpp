#pragma once

#include <stdexcept>
#include <string>

namespace scopt {

// Base class for all structured toolkit errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
struct DomainError : Error {
  using Error::Error;
};

// Vector/matrix sizes do not agree.
struct DimensionError : Error {
  using Error::Error;
};

// Cholesky factorization failed: the matrix is not positive definite.
// Diagnostic, not recoverable; the methods assume nondegenerate Hessians.
struct SingularHessianError : Error {
  using Error::Error;
};

// A centering invariant broke along a path-following run. Usually means the
// declared self-concordance constant of the oracle is too small.
struct CenteringError : Error {
  using Error::Error;
};

// An iteration cap was hit before the stopping test was satisfied.
struct IterationLimitError : Error {
  using Error::Error;
};

// Ill-posed problem data (asymmetric Hessian, rank-deficient constraints,
// infeasible start, ...).
struct InvalidProblemError : Error {
  using Error::Error;
};

}  // namespace scopt
