#ifndef GMTK_ERRORS_HPP
#define GMTK_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace gmtk {

/// Base of every error the toolkit throws.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Mismatched dimensions or objects from different groups/algebras.
struct StructuralError : Error {
  using Error::Error;
};

/// Input outside the domain of a map (e.g. log past its branch cut).
struct DomainError : Error {
  using Error::Error;
};

/// A user-supplied field returned a non-finite value.
struct EvaluationError : Error {
  using Error::Error;
};

/// Fiber Hessian is numerically singular.
struct DegenerateLagrangian : Error {
  DegenerateLagrangian(int rank_, int dim_, double condition_)
      : Error("DegenerateLagrangian: fiber Hessian has numerical rank " + std::to_string(rank_) +
              " of " + std::to_string(dim_) + " (condition number " +
              std::to_string(condition_) + ")"),
        rank(rank_), dim(dim_), condition(condition_) {}
  int rank;
  int dim;
  double condition;
};

/// Malformed configuration document; message carries the field path.
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace gmtk

#endif  // GMTK_ERRORS_HPP
