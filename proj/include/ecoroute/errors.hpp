#pragma once

#include <stdexcept>
#include <string>

namespace ecoroute {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// Target vertex is unreachable from the source.
class NoPath : public Error {
 public:
  using Error::Error;
};

/// A weight handed to the shortest-path solver is negative, NaN or infinite.
class InvalidWeight : public Error {
 public:
  using Error::Error;
};

/// Path enumeration exceeded the caller's bound.
class PathExplosion : public Error {
 public:
  using Error::Error;
};

/// Log-Gaussian beliefs only absorb strictly positive consumption.
class NonPositiveObservation : public Error {
 public:
  using Error::Error;
};

class InvalidSession : public Error {
 public:
  using Error::Error;
};

/// Synthetic instance parameters violate n - 1 <= q <= n(n - 1)/2.
class SpecViolation : public Error {
 public:
  using Error::Error;
};

/// Malformed network, belief, trace, summary or configuration document.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace ecoroute
