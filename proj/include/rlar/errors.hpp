#pragma once

#include <stdexcept>
#include <string>

namespace rlar {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input files, invalid label sets, classes too small for a request.
class DataError : public Error {
public:
    using Error::Error;
};

/// Failed factorizations and non-finite intermediate values.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Invalid parameters or mutually inconsistent options.
class ArgumentError : public Error {
public:
    using Error::Error;
};

}  // namespace rlar
