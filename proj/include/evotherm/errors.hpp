#pragma once

#include <stdexcept>
#include <string>

namespace evotherm {

/// Base class for all errors raised by the library.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct NotSymmetricError : Error {
  using Error::Error;
};
struct NoConvergenceError : Error {
  int iterations = 0;
  NoConvergenceError(const std::string& msg, int iters)
      : Error(msg), iterations(iters) {}
};
struct NotPsdError : Error {
  using Error::Error;
};
struct SingularError : Error {
  using Error::Error;
};
struct NotSquareError : Error {
  using Error::Error;
};
struct SingularKappaError : Error {
  using Error::Error;
};
struct ValidationError : Error {
  using Error::Error;
};
struct ParseError : Error {
  using Error::Error;
};
struct VariantMismatchError : Error {
  using Error::Error;
};
struct UnstableError : Error {
  using Error::Error;
};

}  // namespace evotherm
