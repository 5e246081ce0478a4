#pragma once

#include <stdexcept>
#include <string>

namespace dfosr {

// Caller passed something that violates a documented precondition.
struct InvalidArgument : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A numerical operation degenerated (Cholesky failure, NaN density, underflow...).
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input file; message carries row/column location.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Filesystem failure (missing path, unwritable output).
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace dfosr
