#pragma once

#include <stdexcept>
#include <string>

namespace wavedim {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Rejected input: violated precondition, malformed configuration, size mismatch.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure failed: blow-up, rank deficiency, degenerate fit.
class NumericFailure : public Error {
 public:
  using Error::Error;
};

/// Reading or writing a file failed; the message names the path.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace wavedim
