#pragma once

#include <stdexcept>
#include <string>

namespace cmnet {

/// Input violates a documented precondition (invalid network, non-unitary
/// refinement, missing revealing event, ...).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed JSON document or a document that does not match its schema.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An exhaustive enumeration or a state vector would exceed its size cap.
class CapExceededError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Internal cross-check failed; indicates a wiring or strategy bug.
class ConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// The LP solver hit its pivot limit or lost numerical stability.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cmnet
