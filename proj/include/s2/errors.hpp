#pragma once

#include <stdexcept>
#include <string>

namespace s2 {

// Base class for all errors raised by the engine.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Tensor/feature-map dimension mismatch.
class ShapeError : public Error {
public:
    using Error::Error;
};

// Image/scale geometry violations (non-square, non-divisible sides, ...).
class ScaleError : public Error {
public:
    using Error::Error;
};

// Non-finite inputs where finiteness is a precondition.
class NumericError : public Error {
public:
    using Error::Error;
};

// Malformed binary containers (S2TF, PPM).
class FormatError : public Error {
public:
    using Error::Error;
};

// Weight store does not match the architecture's implied schema.
class SchemaError : public Error {
public:
    using Error::Error;
};

// Singular or near-singular normal matrix in the closed-form solver.
class ConditioningError : public Error {
public:
    using Error::Error;
};

// Bad user-supplied inputs: empty datasets, misaligned pairs, missing files.
class InputError : public Error {
public:
    using Error::Error;
};

} // namespace s2
