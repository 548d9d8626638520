#pragma once

#include <stdexcept>
#include <string>

namespace isocorr {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Caller supplied input that violates a precondition (bad shape, infeasible
/// parameter, malformed file contents).
class ValidationError : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class InfeasibleCorrelation : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class InsufficientData : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// A well-formed input for which the requested quantity does not exist.
class NumericalError : public Error {
public:
    using Error::Error;
};

class SingularMatrix : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class DegenerateVariance : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class UndefinedCorrelation : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class InfiniteTransform : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace isocorr
