#pragma once

#include <stdexcept>
#include <string>

namespace socdiff {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input data (bad ids, parse failures, mismatched files).
class DataError : public Error {
 public:
  using Error::Error;
};

// A method parameter outside its domain (p, lambda, L, fractions, grids).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Target user has no training items; bipartite-only kernels cannot score them.
// Callers should fall back to coldstart scoring.
class NoProfileError : public Error {
 public:
  using Error::Error;
};

// Target user has neither items nor friends. Only the popularity baseline applies.
class UnreachableUserError : public Error {
 public:
  using Error::Error;
};

// Raised when a metric has no population to average over.
class NotEvaluableError : public Error {
 public:
  using Error::Error;
};

}  // namespace socdiff
