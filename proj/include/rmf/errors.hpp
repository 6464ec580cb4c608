#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace rmf {

// Two families: ValidationError (bad input, exit code 2 in the CLI) and
// NumericalError (computation could not proceed, exit code 3).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Zero-speed sample in a curve; carries the offending parameter.
class DegenerateCurveError : public ValidationError {
 public:
  DegenerateCurveError(const std::string& what, double parameter)
      : ValidationError(what), parameter_(parameter) {}
  double parameter() const noexcept { return parameter_; }

 private:
  double parameter_;
};

/// A point left the validity region of a chart or map.
class DomainError : public ValidationError {
 public:
  DomainError(const std::string& what, long index = -1)
      : ValidationError(what), index_(index) {}
  long index() const noexcept { return index_; }

 private:
  long index_;
};

class UnsupportedDimensionError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class CatalogError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Raised when an operation needs unit speed in the chart metric.
class ReparametrizationRequiredError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Curvature fell below the threshold; the Frenet frame is undefined there.
class FrenetUndefinedError : public NumericalError {
 public:
  FrenetUndefinedError(const std::string& what, std::vector<std::size_t> samples)
      : NumericalError(what), samples_(std::move(samples)) {}
  const std::vector<std::size_t>& samples() const noexcept { return samples_; }

 private:
  std::vector<std::size_t> samples_;
};

class SingularMetricError : public NumericalError {
 public:
  SingularMetricError(const std::string& what, double condition)
      : NumericalError(what), condition_(condition) {}
  double condition() const noexcept { return condition_; }

 private:
  double condition_;
};

class ConsistencyError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace rmf
