#pragma once

#include <stdexcept>
#include <string>

namespace rankone {

// Base class for everything thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad user input: malformed descriptors, schema violations, impossible requests.
struct ConfigError : Error {
    using Error::Error;
};

// Numerical failure: non-convergence, breakdown, unreachable precision.
struct NumericError : Error {
    using Error::Error;
};

struct NotProlongable : ConfigError {
    using ConfigError::ConfigError;
};
struct NotGrowing : ConfigError {
    using ConfigError::ConfigError;
};
struct NotStochastic : ConfigError {
    using ConfigError::ConfigError;
};
struct ZeroMassOnSymbolZero : ConfigError {
    using ConfigError::ConfigError;
};
struct NoZeroSymbol : ConfigError {
    using ConfigError::ConfigError;
};
struct NotPrimitive : ConfigError {
    using ConfigError::ConfigError;
};
struct NoConvergence : NumericError {
    using NumericError::NumericError;
};
struct DecompositionFailure : NumericError {
    using NumericError::NumericError;
};
struct MissingFrequency : ConfigError {
    using ConfigError::ConfigError;
};
struct TooManyFreePositions : ConfigError {
    using ConfigError::ConfigError;
};
struct PrecisionUnreachable : NumericError {
    using NumericError::NumericError;
};
struct Divergent : ConfigError {
    using ConfigError::ConfigError;
};
struct MethodDisagreement : NumericError {
    using NumericError::NumericError;
};
struct GridEmpty : ConfigError {
    using ConfigError::ConfigError;
};
struct NumericalBreakdown : NumericError {
    using NumericError::NumericError;
};
struct RankOneViolation : ConfigError {
    using ConfigError::ConfigError;
};
struct DimensionMismatch : ConfigError {
    using ConfigError::ConfigError;
};

} // namespace rankone
