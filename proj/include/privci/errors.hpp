#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace privci {

// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// --- dataset ---
struct MissingColumn : Error {
  using Error::Error;
};
struct ParseFailure : Error {
  std::size_t row, col;
  ParseFailure(std::size_t r, std::size_t c, const std::string& what)
      : Error(what), row(r), col(c) {}
};
struct NonFiniteValue : Error {
  std::size_t row, col;
  NonFiniteValue(std::size_t r, std::size_t c, const std::string& what)
      : Error(what), row(r), col(c) {}
};
struct TooFewRows : Error {
  using Error::Error;
};
// Raised when clip=false and a value exceeds its declared bound, or when a
// regression target violates the |u| <= 1 requirement.
struct BoundViolation : Error {
  std::size_t index;
  BoundViolation(std::size_t i, const std::string& what) : Error(what), index(i) {}
};

// --- kernel regression ---
struct DimensionMismatch : Error {
  using Error::Error;
};
struct SolveFailure : Error {
  using Error::Error;
};
struct NonPositiveLambda : Error {
  using Error::Error;
};
struct EmptyGrid : Error {
  using Error::Error;
};
struct LambdaBelowFloor : Error {
  using Error::Error;
};

// --- dp core ---
struct EmptyScores : Error {
  using Error::Error;
};
struct IndexOutOfRange : Error {
  using Error::Error;
};

// --- statistics / harness ---
struct DegenerateVariance : Error {
  using Error::Error;
};
struct EmptyInput : Error {
  using Error::Error;
};
struct OffLatticeValue : Error {
  using Error::Error;
};
struct InvalidConfig : Error {
  using Error::Error;
};
// Generic precondition violation (non-positive epsilon, bad counts, ...).
struct InvalidParameter : Error {
  using Error::Error;
};

}  // namespace privci
