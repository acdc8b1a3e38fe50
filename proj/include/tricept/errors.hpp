#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tricept {

// Base class for everything this library throws on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A precondition on an argument was violated (non-finite input, bad size, ...).
class InvalidArgumentError : public Error {
public:
    using Error::Error;
};

// Matrix / vector dimensions do not line up.
class ShapeError : public Error {
public:
    using Error::Error;
};

// The mechanism is in (or numerically indistinguishable from) a singular
// configuration: a zero-length leg or an ill-conditioned kinematic Jacobian.
class SingularConfigError : public Error {
public:
    using Error::Error;
};

// A printed closed-form leg-length expansion produced a negative squared
// length; carries the offending leg index (0-based).
class AlgebraMismatchError : public Error {
public:
    AlgebraMismatchError(const std::string& msg, int leg)
        : Error(msg), leg_index(leg) {}
    int leg_index;
};

// An iterative solve ran out of iterations; carries the last residual norm.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& msg, double residual)
        : Error(msg), last_residual(residual) {}
    double last_residual;
};

// A dense factorization or solve failed beyond rescue.
class NumericalError : public Error {
public:
    using Error::Error;
};

// A text file could not be parsed; carries the 1-based line number.
class ParseError : public Error {
public:
    ParseError(const std::string& msg, std::size_t line_no)
        : Error(msg + " (line " + std::to_string(line_no) + ")"), line(line_no) {}
    std::size_t line;
};

// A column had zero range and cannot be min-max scaled.
class NormalizationError : public Error {
public:
    using Error::Error;
};

// Split ratios and dataset size cannot produce the requested partitions.
class SplitError : public Error {
public:
    using Error::Error;
};

// An operation was called on an object in the wrong state (e.g. an
// untrained network).
class StateError : public Error {
public:
    using Error::Error;
};

// The damping loop overflowed before any step was ever accepted.
class TrainingStalledError : public Error {
public:
    using Error::Error;
};

// Filesystem trouble: missing file, unwritable path.
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace tricept
