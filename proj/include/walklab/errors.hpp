#pragma once

#include <stdexcept>
#include <string>

namespace walklab {

/// Invalid walk parameters (epsilon out of range, zero cookies, ...).
class ParamError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A request would exceed the configured memory budget or the packed
/// coordinate range.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An operation was called with a drift variant it is not defined for.
class VariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Index or window outside the admissible range.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Too few samples for the requested estimate.
class InsufficientDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A log-log fit was handed a metric <= 0.
class NonPositiveMetricError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace walklab
