#pragma once

#include <stdexcept>
#include <string>

namespace nlds {

// Validation failures (bad parameters, malformed config) use
// std::invalid_argument; anything that goes wrong during a computation
// derives from NumericalError so the CLI can map it to its own exit code.

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IntegrationDiverged : NumericalError {
    using NumericalError::NumericalError;
};

struct NoSignChange : NumericalError {
    using NumericalError::NumericalError;
};

struct GridMismatch : NumericalError {
    using NumericalError::NumericalError;
};

struct EigenSolverError : NumericalError {
    using NumericalError::NumericalError;
};

}  // namespace nlds
