#pragma once

#include <stdexcept>
#include <string>

namespace loewner {

// Error taxonomy shared by all modules. The CLI maps these onto exit codes.
struct loewner_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Input data violates a structural precondition (non-monotone times, bad sizes).
struct malformed_input : loewner_error {
  using loewner_error::loewner_error;
};

// A scalar argument is outside the mathematical domain of the operation.
struct domain_error : loewner_error {
  using loewner_error::loewner_error;
};

// Geometric preconditions fail (self-intersecting curve, hull touching trace).
struct geometry_error : loewner_error {
  using loewner_error::loewner_error;
};

// A computation could not reach its accuracy contract.
struct accuracy_error : loewner_error {
  using loewner_error::loewner_error;
};

// Point spacing or grid resolution too coarse for a stable computation.
struct resolution_error : loewner_error {
  using loewner_error::loewner_error;
};

}  // namespace loewner
