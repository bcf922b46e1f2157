#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace poise {

/// Base class for every error raised by the library. `kind()` is a stable
/// machine-readable class name; the CLI prints it and maps it to an exit code.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

class BoundsError : public Error {
 public:
  explicit BoundsError(const std::string& msg) : Error("bounds-violation", msg) {}
};

/// Routine validation failure. `field()` names the offending routine field.
class ValidationError : public Error {
 public:
  enum class Reason {
    missing_field,
    unknown_field,
    wrong_type,
    empty,
    length_mismatch,
    bounds_order,
    init_out_of_bounds,
    nonpositive_tol,
    tol_too_large,
    name_mismatch,
  };

  ValidationError(Reason reason, std::string field, const std::string& msg)
      : Error("validation", msg), reason_(reason), field_(std::move(field)) {}

  Reason reason() const noexcept { return reason_; }
  const std::string& field() const noexcept { return field_; }

 private:
  Reason reason_;
  std::string field_;
};

class EmptyRegionError : public Error {
 public:
  explicit EmptyRegionError(const std::string& msg) : Error("empty-region", msg) {}
};

class UnknownCostError : public Error {
 public:
  explicit UnknownCostError(const std::string& msg) : Error("unknown-cost", msg) {}
};

class DuplicateCostError : public Error {
 public:
  explicit DuplicateCostError(const std::string& msg) : Error("duplicate-cost", msg) {}
};

/// A cost function was handed a context that lacks something it needs
/// (target spectrum, reference, aux value, FID...).
class MissingContextError : public Error {
 public:
  explicit MissingContextError(const std::string& msg) : Error("missing-context", msg) {}
};

class DegenerateNormalizationError : public Error {
 public:
  explicit DegenerateNormalizationError(const std::string& msg)
      : Error("degenerate-normalization", msg) {}
};

class DegenerateReferenceError : public Error {
 public:
  explicit DegenerateReferenceError(const std::string& msg)
      : Error("degenerate-reference", msg) {}
};

class TruncatedFidError : public Error {
 public:
  explicit TruncatedFidError(const std::string& msg) : Error("truncated-fid", msg) {}
};

class InsufficientSignalError : public Error {
 public:
  explicit InsufficientSignalError(const std::string& msg) : Error("insufficient-signal", msg) {}
};

class InsufficientDiffusionWeightingError : public Error {
 public:
  explicit InsufficientDiffusionWeightingError(const std::string& msg)
      : Error("insufficient-diffusion-weighting", msg) {}
};

class UnknownBackendError : public Error {
 public:
  explicit UnknownBackendError(const std::string& msg) : Error("unknown-backend", msg) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg) : Error("config", msg) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& msg) : Error("io", msg) {}
};

/// Malformed log file. `line()` is 1-based.
class LogParseError : public Error {
 public:
  LogParseError(std::size_t line, const std::string& msg)
      : Error("log-parse", "line " + std::to_string(line) + ": " + msg), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace poise
