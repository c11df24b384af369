#pragma once

#include <stdexcept>
#include <string>

namespace pucci {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parameters violate 0 < lambda <= Lambda, dim >= 3 or the standing Ñ > 2 assumption.
class InvalidParams : public Error {
public:
    using Error::Error;
};

/// The critical-exponent bracket did not contain a sign change of the shot classifier.
class BracketViolation : public Error {
public:
    using Error::Error;
};

/// An exponent at or above the critical one was requested for a Dirichlet ball problem.
class Supercritical : public Error {
public:
    using Error::Error;
};

/// A numerical procedure ran out of its iteration or step budget.
class BudgetExhausted : public Error {
public:
    using Error::Error;
};

/// Requested evaluation outside the stored domain of a profile.
class OutOfRange : public Error {
public:
    using Error::Error;
};

}  // namespace pucci
