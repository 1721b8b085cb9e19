#pragma once

#include <stdexcept>
#include <string>

namespace dimv {

// Base class for all toolkit errors. `exit_code()` mirrors the CLI
// convention: 2 = data/validation error, 3 = numerical error.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
  virtual int exit_code() const { return 2; }
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

// CSV cell that is neither numeric nor the NA token, ragged rows, etc.
class ParseError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Unknown or unsupported model-file version.
class VersionError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Infeasible mask generation (e.g. a rate that forces a fully missing column).
class GenerationError : public Error {
 public:
  using Error::Error;
};

// Empty evaluation mask.
class ScoringError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
  int exit_code() const override { return 3; }
};

// A feature with no observed entries, or a failed parameter fit.
class EstimationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Rank-deficient linear system at alpha = 0.
class SingularityError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Argument outside the mathematical domain (nonpositive conditional
// variance, degenerate conditioning, alpha != 0 confidence region).
class DomainError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Feature selection called with an empty observed set.
class SelectionError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class TuningError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace dimv
