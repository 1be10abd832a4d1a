#pragma once

#include <stdexcept>
#include <string>

namespace aniso {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct NotSquare : Error {
    using Error::Error;
};
struct NotPositiveDefinite : Error {
    using Error::Error;
};
struct ZeroVector : Error {
    using Error::Error;
};
struct NotOrthogonal : Error {
    using Error::Error;
};
struct DimensionMismatch : Error {
    using Error::Error;
};
struct OutOfRange : Error {
    using Error::Error;
};
struct MassOutOfRange : Error {
    using Error::Error;
};
struct SingularMatrix : Error {
    using Error::Error;
};
struct EmptyInterior : Error {
    using Error::Error;
};
struct UnsupportedVariant : Error {
    using Error::Error;
};
struct UnsupportedSliceDirection : Error {
    using Error::Error;
};
struct UnsupportedDimension : Error {
    using Error::Error;
};
struct GridTooCoarse : Error {
    using Error::Error;
};
struct QuadratureNotConverged : Error {
    using Error::Error;
};
struct ResolutionTooLow : Error {
    using Error::Error;
};
struct InputError : Error {
    using Error::Error;
};

}  // namespace aniso
