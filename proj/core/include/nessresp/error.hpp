#pragma once

#include <stdexcept>
#include <string>

namespace nessresp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidDimensionError : public Error {
 public:
  using Error::Error;
};

/// A scalar function or parameter was evaluated outside its domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An operator that must be invertible (usually a steady state) is singular.
class RankError : public Error {
 public:
  using Error::Error;
};

/// Linear solve, eigen solve or propagation did not reach its tolerance.
class SolverError : public Error {
 public:
  using Error::Error;
};

/// The generator has more than one stationary state.
class AmbiguityError : public SolverError {
 public:
  using SolverError::SolverError;
};

}  // namespace nessresp
