#pragma once

#include <stdexcept>
#include <string>

namespace lswmkc {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or non-finite input data.
class InputError : public Error {
 public:
  using Error::Error;
};

// Hyper-parameter or configuration outside its admissible range.
class ParameterError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

// A numerical routine failed (eigensolver non-convergence, root finding).
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Input is well formed but degenerate for the requested operation,
// e.g. a zero-variance sample during kernel normalization.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

// File system and parse failures from the io layer.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace lswmkc
