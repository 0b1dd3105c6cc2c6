#pragma once

#include <stdexcept>
#include <string>

namespace rpca {

// Bad argument or shape mismatch supplied by the caller.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Input data violates a domain invariant (non-finite values, empty input,
// unlabeled data where labels are required).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Fewer than two points handed to a fit that needs a spread.
class DegenerateInputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Metric undefined for the given labels (e.g. a single class for ROC AUC).
class UndefinedMetricError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// File access or parse failure. Carries the offending location when known.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rpca
