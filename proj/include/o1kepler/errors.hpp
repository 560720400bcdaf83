#pragma once

#include <stdexcept>
#include <string>

namespace o1kepler {

/// Input violates an operation's precondition (wrong dimension, off-cone point, bad spec, ...).
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A closed-form trajectory passes through the origin at the requested parameter.
class CollisionError : public std::runtime_error {
public:
    CollisionError(const std::string& what, double tau)
        : std::runtime_error(what), tau_(tau) {}

    double tau() const noexcept { return tau_; }

private:
    double tau_;
};

/// An iterative method failed to reach its tolerance.
class NumericalFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace o1kepler
