#pragma once

#include <stdexcept>
#include <string>

namespace besselheat {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the requested operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// The requested value is infinite (e.g. I_nu(0) for nu < 0).
class PoleError : public DomainError {
public:
    using DomainError::DomainError;
};

/// A root search or series did not converge within its iteration budget.
class IterationFailure : public Error {
public:
    using Error::Error;
};

/// The spectral series was refused because lambda_1^2 t is below the floor.
class IllConditioned : public Error {
public:
    using Error::Error;
};

/// A simulation or scan configuration violates its invariants.
class ConfigError : public DomainError {
public:
    using DomainError::DomainError;
};

/// A numerical invariant failed at runtime (negative remainder, etc.).
class NumericalError : public Error {
public:
    using Error::Error;
};

}  // namespace besselheat
