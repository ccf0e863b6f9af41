#pragma once

#include <stdexcept>
#include <string>

namespace isinglearn {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A value violates a type invariant (asymmetry, non-finite entries, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Malformed model, sample or config file.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Out-of-range or inconsistent parameters (unrealizable graph, bad dims).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// The request exceeds what brute-force enumeration can handle.
class CapabilityError : public Error {
 public:
  using Error::Error;
};

/// A randomized construction or numerical routine gave up.
class ConstructionError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values appeared during optimization.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace isinglearn
