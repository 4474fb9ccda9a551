#pragma once

#include <stdexcept>
#include <string>

namespace bsphere {

// Invalid argument ranges (n < 2, k < 1, eps <= 0, ...).
struct ParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Malformed combinatorial input: not a tree, not a quadrangulation, ...
struct StructuralError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The sample is too sparse for a metric construction to be conclusive.
struct SamplingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace bsphere
