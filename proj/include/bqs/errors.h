#pragma once

#include <stdexcept>
#include <string>

namespace bqs {

/// A model invariant was broken during a run (as opposed to a malformed
/// request). The CLI maps these to exit code 2.
class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A strategy held more qubits than its declared bound at an enforcement
/// point.
class MemoryBoundViolation : public InvariantViolation {
 public:
  using InvariantViolation::InvariantViolation;
};

/// A strategy cannot be instantiated under the requested model variant.
class StrategyRejected : public InvariantViolation {
 public:
  using InvariantViolation::InvariantViolation;
};

/// A second sub-protocol was started while another one was still running.
class ConcurrencyViolation : public InvariantViolation {
 public:
  using InvariantViolation::InvariantViolation;
};

/// Parameters admit no positive output length (or no n below the search cap).
/// The CLI maps these to exit code 2.
class InfeasibleParameters : public InvariantViolation {
 public:
  using InvariantViolation::InvariantViolation;
};

/// Enumerating a distribution would exceed the configured row budget.
class EnumerationBudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bqs
