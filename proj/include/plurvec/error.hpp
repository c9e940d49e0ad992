#pragma once

#include <stdexcept>
#include <string>

namespace plurvec {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data. The CLI maps this to exit code 3.
class DataError : public Error {
public:
    using Error::Error;
};

/// A caller broke a precondition (bad argument, impossible request).
/// The CLI maps this to exit code 2.
class UsageError : public Error {
public:
    using Error::Error;
};

} // namespace plurvec
