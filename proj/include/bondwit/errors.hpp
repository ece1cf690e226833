#pragma once

#include <stdexcept>
#include <string>

namespace bondwit {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input violates a documented precondition of the callee (e.g. non-Hermitian matrix).
class ContractViolation : public Error {
public:
    using Error::Error;
};

class ShapeError : public Error {
public:
    using Error::Error;
};

/// Requested object would exceed the configured memory/enumeration budget.
class ResourceError : public Error {
public:
    using Error::Error;
};

class DegeneracyError : public Error {
public:
    using Error::Error;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

/// A cut-and-glue operator was requested for an empty quotient space.
class NoOperatorError : public Error {
public:
    using Error::Error;
};

class SolverError : public Error {
public:
    using Error::Error;
};

}  // namespace bondwit
