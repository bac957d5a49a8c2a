#pragma once

#include <stdexcept>
#include <string>

namespace mmcoal {

// Argument outside the mathematical domain of an operation (k > n, unknown locus, ...).
struct DomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Model or measure that fails validation (masses, stochastic matrices, reducibility).
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Problem too large for an exact or desk-scale routine.
struct SizeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotFoundError : std::out_of_range {
    using std::out_of_range::out_of_range;
};

// A proposal produced no admissible move, or a sampled move had zero forward probability.
struct ProposalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace mmcoal
