#pragma once

#include <stdexcept>
#include <string>

namespace irsbf {

/// Scenario or system parameters violate an invariant. Maps to CLI exit code 1.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Matrix/vector dimensions disagree.
class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Solver produced a non-finite objective or hit a singular system.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, int outer_iteration)
        : std::runtime_error(what + " (outer iteration " + std::to_string(outer_iteration) + ")"),
          outer_iteration_(outer_iteration) {}

    int outer_iteration() const noexcept { return outer_iteration_; }

private:
    int outer_iteration_;
};

/// Monte Carlo run could not produce a usable result (e.g. too many failed trials).
class ScenarioError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace irsbf

namespace irsbf {

/// File could not be read or written; the message carries the path.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace irsbf
