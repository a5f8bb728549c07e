#pragma once

#include <stdexcept>
#include <string>

namespace catmix {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotUnimodular : Error {
    using Error::Error;
};

struct NotHyperbolic : Error {
    using Error::Error;
};

struct NotPrimitiveVector : Error {
    using Error::Error;
};

struct FactorizationTimeout : Error {
    using Error::Error;
};

// Geometry could not be validated even after shrinking the marker segment.
struct DegenerateGeometry : Error {
    using Error::Error;
};

// A crossing test stayed within tolerance of a boundary after all retries.
struct NumericallyAmbiguous : Error {
    using Error::Error;
};

struct TraceBoundViolated : Error {
    using Error::Error;
};

struct AllZeroSeries : Error {
    using Error::Error;
};

struct SearchExhausted : Error {
    using Error::Error;
};

struct ParseError : Error {
    using Error::Error;
};

}  // namespace catmix
