#pragma once

#include <stdexcept>
#include <string>

namespace cbc {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the operation (p < 2, k <= l, y <= 0, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// An integer argument would overflow the native 64-bit engine (n >= 2^62, ...).
class RangeError : public Error {
public:
    using Error::Error;
};

/// Evaluation at a singular point (E1(0), F(0), ...).
class SingularityError : public Error {
public:
    using Error::Error;
};

/// A checkpoint file is corrupt, truncated or has an unknown format version.
class LoadError : public Error {
public:
    using Error::Error;
};

/// A configured resource budget (memory) would be exceeded.
class ResourceError : public Error {
public:
    using Error::Error;
};

/// An internal self-check failed (e.g. a composite cofactor survived the sieve).
class ConsistencyError : public Error {
public:
    using Error::Error;
};

/// A transform returned a non-finite value at a quadrature node.
class PropagationError : public Error {
public:
    using Error::Error;
};

} // namespace cbc
