#pragma once

#include <stdexcept>
#include <string>

namespace lesskit {

// Base class for all recoverable library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RankDeficientError : Error {
  using Error::Error;
};

struct SingularUpdateError : Error {
  using Error::Error;
};

struct NotPowerOfTwoError : Error {
  using Error::Error;
};

struct ZeroMatrixError : Error {
  using Error::Error;
};

struct DimensionMismatchError : Error {
  using Error::Error;
};

struct InvalidDistributionError : Error {
  using Error::Error;
};

struct SketchTooLargeError : Error {
  using Error::Error;
};

struct SketchTooSmallError : Error {
  using Error::Error;
};

struct RankDeficientSketchError : Error {
  using Error::Error;
};

struct LeverageAtOneError : Error {
  using Error::Error;
};

struct NoConvergenceError : Error {
  using Error::Error;
};

struct DimensionTooLargeError : Error {
  using Error::Error;
};

struct OutOfRangeError : Error {
  using Error::Error;
};

struct TooFewSamplesError : Error {
  using Error::Error;
};

struct ZeroVectorError : Error {
  using Error::Error;
};

struct DegenerateDatasetError : Error {
  using Error::Error;
};

struct EmptyResultsError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

// Malformed input text; carries the 1-based line number.
struct ParseError : Error {
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_number(line) {}
  std::size_t line_number;
};

// Nonpositive, nonincreasing, or duplicate feature index in input text.
struct IndexError : Error {
  IndexError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_number(line) {}
  std::size_t line_number;
};

}  // namespace lesskit
