#pragma once
// Exception hierarchy shared by all modules. The CLI maps each family to a
// stable exit code (see tools/condent.cpp).

#include <stdexcept>
#include <string>

#include "condent/estimate.hpp"

namespace condent {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad spec strings or CLI arguments.
class ParseError : public Error {
public:
    using Error::Error;
};

// A constructor or operation received parameters outside its precondition.
class ParameterError : public Error {
public:
    using Error::Error;
};

// Distortion (or other argument) outside the window an expression is valid on.
class DomainError : public Error {
public:
    using Error::Error;
};

// pdf fails its normalization check.
class InputError : public Error {
public:
    using Error::Error;
};

// Observation too far in the tail for the marginal to be resolved.
class TailError : public Error {
public:
    using Error::Error;
};

// Integrals that should be finite are not (nu(y), E[log X], ...).
class RegularityError : public Error {
public:
    using Error::Error;
};

// Input law is outside the class an operation supports (e.g. infinite J).
class UnsupportedInputError : public Error {
public:
    using Error::Error;
};

// Numerical identity cross-check failed.
class IdentityViolation : public Error {
public:
    using Error::Error;
};

// Function value not finite where it has to be.
class EvaluationError : public Error {
public:
    using Error::Error;
};

// kNN sample set has too many exact ties.
class DegenerateSampleError : public Error {
public:
    using Error::Error;
};

// Importance sampler lost too much effective sample size.
class ResolutionError : public Error {
public:
    using Error::Error;
};

class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, EstimateWithError best)
        : Error(what), best_(best) {}
    const EstimateWithError& best() const noexcept { return best_; }

private:
    EstimateWithError best_;
};

}  // namespace condent
