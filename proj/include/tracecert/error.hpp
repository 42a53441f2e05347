#pragma once

#include <stdexcept>
#include <string>

namespace tracecert {

/// Base class of every error thrown by the library. The CLI maps each
/// subclass onto a process exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An index outside its admissible range, e.g. k >= n for a block vector.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A model parameter violates its precondition (p <= 1, n < 1, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// A requested object would exceed a configured size cap.
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// Eigensolver breakdown, singular frame operator and similar.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Caller misuse that is not a numerical parameter: too few points for a
/// fit, grid mismatch, family too small.
class UsageError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace tracecert
