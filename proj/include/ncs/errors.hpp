#pragma once

#include <stdexcept>

namespace ncs {

// Invalid domain input: mismatched lengths, bad ranges, broken invariants.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed file content or solver output text.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An external solver process produced no usable result.
struct BridgeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A decoded model failed to reproduce the learning set it was built from.
struct FaithfulnessError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Exhaustive search refused an instance above its size limits.
struct SizeGuardError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace ncs
