#pragma once

#include <stdexcept>
#include <string>

namespace ppm {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data: files, configuration, point sets.
class InputError : public Error {
public:
    using Error::Error;
};

/// Numerical failure: overflow, rank deficiency, non-finite values.
class NumericalError : public Error {
public:
    using Error::Error;
};

}  // namespace ppm
