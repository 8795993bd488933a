#ifndef FRAGAREA_ERRORS_HPP_
#define FRAGAREA_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace fragarea {

/// Base class for all library errors. `code()` returns a stable
/// machine-readable tag used by the CLI diagnostics and exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual const char* code() const noexcept { return "Error"; }
};

class InvalidParameter : public Error {
public:
    using Error::Error;
    const char* code() const noexcept override { return "InvalidParameter"; }
};

class DivergentIntegral : public Error {
public:
    using Error::Error;
    const char* code() const noexcept override { return "DivergentIntegral"; }
};

class EmptyMeasure : public Error {
public:
    using Error::Error;
    const char* code() const noexcept override { return "EmptyMeasure"; }
};

class DomainError : public Error {
public:
    using Error::Error;
    const char* code() const noexcept override { return "DomainError"; }
};

class QuadratureFailure : public Error {
public:
    using Error::Error;
    const char* code() const noexcept override { return "QuadratureFailure"; }
};

class NotFinite : public Error {
public:
    using Error::Error;
    const char* code() const noexcept override { return "NotFinite"; }
};

class NoConvergence : public Error {
public:
    using Error::Error;
    const char* code() const noexcept override { return "NoConvergence"; }
};

class BudgetExceeded : public Error {
public:
    using Error::Error;
    const char* code() const noexcept override { return "BudgetExceeded"; }
};

class InsufficientSamples : public Error {
public:
    using Error::Error;
    const char* code() const noexcept override { return "InsufficientSamples"; }
};

class ParseError : public Error {
public:
    using Error::Error;
    const char* code() const noexcept override { return "ParseError"; }
};

}  // namespace fragarea

#endif  // FRAGAREA_ERRORS_HPP_
