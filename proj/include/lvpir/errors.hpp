#pragma once

#include <stdexcept>
#include <string>

namespace lvpir {

// Base for all recoverable errors raised by this library. The CLI maps
// these to exit code 2 (input or capability error).
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed token or header in a matrix/database file.
struct ParseError : Error {
  using Error::Error;
};

// Ragged rows, wrong row count, or size mismatch against a declared header.
struct ShapeError : Error {
  using Error::Error;
};

// A matrix column is not a probability distribution (bad sum or range).
struct StochasticityError : Error {
  using Error::Error;
};

// Instance exceeds the subset-enumeration cap; use a grouping or full plan.
struct TooLargeError : Error {
  using Error::Error;
};

// Message index outside [1..K], or an invalid index set.
struct IndexError : Error {
  using Error::Error;
};

// Requested index is not part of the query, so the answer cannot contain it.
struct NotInQueryError : Error {
  using Error::Error;
};

// Exact audit would have to enumerate more query realizations than allowed.
struct TooManyQueriesError : Error {
  using Error::Error;
};

}  // namespace lvpir
