#pragma once

#include <stdexcept>
#include <string>

namespace vpforest {

/// Base class for all errors raised by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A rounded value left the dynamic range of the requested format and the
/// format's overflow policy was Error.
struct RangeOverflowError : Error {
    RangeOverflowError(double value, int mantissa_bits, int exponent_bits)
        : Error("value " + std::to_string(value) + " overflows format (p=" +
                std::to_string(mantissa_bits) + ", e=" + std::to_string(exponent_bits) + ")"),
          value(value),
          mantissa_bits(mantissa_bits),
          exponent_bits(exponent_bits) {}

    double value;
    int mantissa_bits;
    int exponent_bits;
};

/// Input vector length does not match the configured feature/class count.
struct DimensionMismatchError : Error {
    using Error::Error;
};

/// Base for errors caused by reduced-precision rounding producing a
/// non-finite value inside the classifier. Replaces a hard crash with a
/// reportable condition.
struct NonFiniteError : Error {
    using Error::Error;
};

/// A feature value, hyperparameter, random variate, or arithmetic result
/// became non-finite after rounding.
struct NonFiniteFeatureError : NonFiniteError {
    using NonFiniteError::NonFiniteError;
};

/// A node bound became non-finite when stored.
struct NonFiniteBoundError : NonFiniteError {
    using NonFiniteError::NonFiniteError;
};

/// Fewer rows than one window, or an empty sample sequence.
struct EmptyStreamError : Error {
    using Error::Error;
};

/// Confusion matrix with no recorded outcomes.
struct EmptyMatrixError : Error {
    using Error::Error;
};

/// Two reports do not share the same checkpoint grid.
struct CheckpointMismatchError : Error {
    using Error::Error;
};

/// Two sweep outputs do not describe comparable cells.
struct GridMismatchError : Error {
    using Error::Error;
};

/// A file could not be opened, read to the end, or written.
struct IoError : Error {
    using Error::Error;
};

/// Malformed input file; carries a 1-based line number when known.
struct SchemaError : Error {
    SchemaError(const std::string& msg, std::size_t line = 0)
        : Error(line ? msg + " (line " + std::to_string(line) + ")" : msg), line(line) {}

    std::size_t line;
};

}  // namespace vpforest
