#pragma once
#include <stdexcept>
#include <string>

namespace eikjohn {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad arguments or unmet geometric preconditions (empty mask, mismatched grids, ...).
struct DomainError : Error { using Error::Error; };
// Data violates a declared invariant (non-positive alpha, region touching the border, ...).
struct ValidationError : Error { using Error::Error; };
// Bad run configuration: unknown scenario, insufficient resolution, malformed flags/files.
struct ConfigError : Error { using Error::Error; };
// Operation is not defined for this cost-model kind.
struct UnsupportedModelError : Error { using Error::Error; };
// Gradient descent on the value field stagnated or exceeded its length budget.
struct BacktrackError : Error { using Error::Error; };

} // namespace eikjohn
