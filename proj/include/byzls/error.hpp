#pragma once

#include <stdexcept>
#include <string>

namespace byzls {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on the arguments of an operation does not hold.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Training diverged or an aggregation produced unusable output.
class SimulationError : public Error {
public:
    using Error::Error;
};

}  // namespace byzls
