#pragma once

#include <stdexcept>
#include <string>

namespace qvar {

// Error hierarchy used across the library. The CLI maps these to exit codes:
// config/schema problems -> 2, non-finite numerics -> 3.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidInput : Error {
    using Error::Error;
};

struct DomainError : Error {
    using Error::Error;
};

struct IndexError : Error {
    using Error::Error;
};

struct InvalidForm : Error {
    using Error::Error;
};

struct InvalidCompetitor : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct NumericalError : Error {
    using Error::Error;
};

}  // namespace qvar
