#pragma once

#include <stdexcept>
#include <string>

namespace fairpr {

/// Malformed or inconsistent input data (files, node sets, parameters).
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A fairness constraint that no admissible jump vector can satisfy.
class InfeasibleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A fixed-point iteration that failed to reach its tolerance. For a valid
/// stochastic model this indicates a bug rather than bad input.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace fairpr
