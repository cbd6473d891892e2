#pragma once

#include <stdexcept>
#include <string>

namespace alg {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter or configuration value is outside its admissible range.
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

/// A coefficient was evaluated outside its domain (e.g. density outside [0,1]).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The lattice is too coarse for the jump rates to be nonnegative.
class ScaleError : public InvalidParameter {
 public:
  ScaleError(const std::string& what, int minimal_n) : InvalidParameter(what), minimal_n_(minimal_n) {}
  int minimal_n() const noexcept { return minimal_n_; }

 private:
  int minimal_n_;
};

/// A numerical procedure failed: CFL violation, non-finite values, eigen-solver breakdown.
class NumericalAbort : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace alg
