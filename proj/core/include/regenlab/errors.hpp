#pragma once

#include <stdexcept>
#include <string>

namespace regenlab {

// Index outside the valid range of a driving sequence (indices start at 1).
class IndexError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A declared functional or event read data outside its declared window.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A past event consulted an index later than its base time.
class MeasurabilityError : public ContractError {
 public:
  using ContractError::ContractError;
};

// Exact enumeration would exceed the configured guard.
class SizeError : public std::length_error {
 public:
  using std::length_error::length_error;
};

// Observed gap mass where the factor event has probability zero.
class InconsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SearchBoundError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace regenlab
