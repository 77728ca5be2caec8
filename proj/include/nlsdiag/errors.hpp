#pragma once

#include <stdexcept>
#include <string>

namespace nlsdiag {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the operation (t <= 0, r < 1, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A specification or scenario configuration is inconsistent.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A field contains NaN or Inf.
class DataIntegrityError : public Error {
public:
    using Error::Error;
};

/// Two fields that must share a grid do not.
class GridMismatchError : public Error {
public:
    using Error::Error;
};

/// The closed-form nonlinear substep became singular; retry with a smaller dt.
class StepSizeError : public Error {
public:
    using Error::Error;
};

/// A time window or series does not cover the requested range.
class RangeError : public Error {
public:
    using Error::Error;
};

/// The diagnostic is only defined for a narrower parameter range.
class ScopeError : public Error {
public:
    using Error::Error;
};

/// Truncation level too small: the truncated profile vanishes.
class LevelError : public DomainError {
public:
    using DomainError::DomainError;
};

/// An atomic measure or cutoff cannot be built from the given data.
class ConstructionError : public DomainError {
public:
    using DomainError::DomainError;
};

}  // namespace nlsdiag
