#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace iqbench {

// Base class for every error thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A required class (ground or excited) is absent from a dataset.
struct EmptyClassError : Error {
    using Error::Error;
};

// Split fraction outside (0,1).
struct BadFractionError : Error {
    using Error::Error;
};

// A value that must be finite is NaN or infinite.
struct NonFiniteValueError : Error {
    using Error::Error;
};

// CSV parsing failure, carries the 1-based row and the column name.
struct ParseError : Error {
    std::size_t row;
    std::string column;
    ParseError(std::size_t row_, std::string column_, const std::string& reason)
        : Error("parse error at row " + std::to_string(row_) + ", column " + column_ + ": " + reason),
          row(row_),
          column(std::move(column_)) {}
};

struct IoError : Error {
    using Error::Error;
};

// Qubit and resonator frequencies coincide; the shift formula divides by the detuning.
struct ZeroDetuningError : Error {
    using Error::Error;
};

struct InvalidHyperparamError : Error {
    std::string name;
    InvalidHyperparamError(std::string name_, const std::string& reason)
        : Error("invalid hyperparameter '" + name_ + "': " + reason), name(std::move(name_)) {}
};

// An iterative trainer exceeded its iteration cap.
struct NonConvergenceError : Error {
    NonConvergenceError(const std::string& kind, const std::string& detail)
        : Error("training did not converge (" + kind + "): " + detail) {}
};

struct NonFiniteInputError : Error {
    using Error::Error;
};

// predict_proba requested from a model that has no probability output.
struct ProbaUnsupportedError : Error {
    using Error::Error;
};

struct DegenerateCentroidsError : Error {
    using Error::Error;
};

struct CholeskyFailureError : Error {
    using Error::Error;
};

// Training loss became NaN/Inf.
struct DivergenceDetectedError : Error {
    using Error::Error;
};

struct GridTooLargeError : Error {
    using Error::Error;
};

struct SingleClassError : Error {
    using Error::Error;
};

struct EmptyTestSetError : Error {
    using Error::Error;
};

struct FoldMissingClassError : Error {
    using Error::Error;
};

// Timed region too short for the clock even after batch enlargement.
struct ClockResolutionTooCoarseError : Error {
    using Error::Error;
};

// Model metadata disagrees with the requested evaluation split.
struct SplitSeedMismatchError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

}  // namespace iqbench
