#pragma once

#include <stdexcept>
#include <string>

namespace lll {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inputs of incompatible truncation, or a weight table built for other data.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// The truncation N cannot represent the requested object to tolerance.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

/// NaN/Inf in a state, or a conservation tripwire fired.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Caller violated an operation's contract (bad ensemble, bad time list, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A least-squares fit had too few usable points.
class FitError : public Error {
 public:
  using Error::Error;
};

/// Malformed or invalid experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace lll
