// rv-Euler error types
#pragma once

#include <stdexcept>
#include <string>

namespace rveuler {

/// Argument outside an operation's contract (non-unit axis, zero norm, bad matrix).
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// State outside the domain where the equations of motion are defined
/// (r <= 0, v below v_min, altitude below the atmosphere floor).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Coordinate singularity of the spherical formulation (pole or vertical flight).
class SingularityError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Degenerate geometry for a state conversion (parallel r and v, pole).
class DegenerateGeometry : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

/// A derivative evaluation failed during integration; carries the step time.
class PropagationError : public DomainError {
public:
    PropagationError(double time, const std::string& what)
        : DomainError(what + " (t = " + std::to_string(time) + " s)"), time_(time) {}

    double time() const noexcept { return time_; }

private:
    double time_;
};

} // namespace rveuler
