#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace specdep {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  /// Short machine-readable category, e.g. "dimension" or "singular".
  virtual const char* kind() const noexcept { return "error"; }
};

/// Message names the offending line (text formats) or byte offset (binary).
class MalformedInputError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "malformed-input"; }
};

class DimensionError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "dimension"; }
};

class RangeError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "range"; }
};

class CoverageError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "coverage"; }
};

class NormModeError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "norm-mode"; }
};

/// A block (or single channel) had zero norm in one segment at one frequency.
class DegenerateSegmentError : public Error {
 public:
  DegenerateSegmentError(std::size_t segment, int freq, std::size_t index,
                         const std::string& what_index)
      : Error("zero-norm coefficients at segment " + std::to_string(segment) +
              ", frequency " + std::to_string(freq) + ", " + what_index + " " +
              std::to_string(index)),
        segment_(segment),
        freq_(freq),
        index_(index) {}
  const char* kind() const noexcept override { return "degenerate-segment"; }
  std::size_t segment() const noexcept { return segment_; }
  int freq() const noexcept { return freq_; }
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t segment_;
  int freq_;
  std::size_t index_;
};

/// Factorization met a non-positive pivot: the matrix is singular or indefinite.
class SingularMatrixError : public Error {
 public:
  SingularMatrixError(std::size_t pivot, double value)
      : Error("singular or indefinite matrix: pivot " + std::to_string(pivot) +
              " = " + std::to_string(value)),
        pivot_(pivot) {}
  const char* kind() const noexcept override { return "singular"; }
  std::size_t pivot() const noexcept { return pivot_; }

 private:
  std::size_t pivot_;
};

/// A measure came out materially negative; indicates numerical failure.
class ConsistencyError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "consistency"; }
};

class ConfigError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "config"; }
};

}  // namespace specdep
