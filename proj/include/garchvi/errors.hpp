#pragma once

#include <stdexcept>
#include <string>

namespace garchvi {

/// Base class for all garchvi errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct FileNotFound : Error {
    explicit FileNotFound(const std::string& path) : Error("file not found: " + path) {}
};

struct ParseError : Error {
    std::size_t row;
    ParseError(std::size_t row_, const std::string& reason)
        : Error("parse error at row " + std::to_string(row_) + ": " + reason), row(row_) {}
};

struct DuplicateDate : Error {
    explicit DuplicateDate(const std::string& date) : Error("duplicate date: " + date) {}
};

struct EmptySeries : Error {
    EmptySeries() : Error("return series is empty") {}
};

struct DegenerateSplit : Error {
    explicit DegenerateSplit(const std::string& msg) : Error("degenerate split: " + msg) {}
};

struct ConstraintViolation : Error {
    explicit ConstraintViolation(const std::string& msg) : Error("constraint violation: " + msg) {}
};

struct ShapeViolation : Error {
    explicit ShapeViolation(const std::string& msg) : Error("distribution shape violation: " + msg) {}
};

struct NonFiniteVariance : Error {
    explicit NonFiniteVariance(const std::string& msg) : Error("non-finite variance: " + msg) {}
};

struct DimensionMismatch : Error {
    explicit DimensionMismatch(const std::string& msg) : Error("dimension mismatch: " + msg) {}
};

struct BoundaryValue : Error {
    explicit BoundaryValue(const std::string& msg) : Error("boundary value: " + msg) {}
};

struct SingularCovariance : Error {
    explicit SingularCovariance(const std::string& msg) : Error("singular covariance: " + msg) {}
};

struct CovarianceUpdateFailure : Error {
    explicit CovarianceUpdateFailure(const std::string& msg)
        : Error("covariance update failure: " + msg) {}
};

struct NonFiniteEvaluation : Error {
    explicit NonFiniteEvaluation(const std::string& msg) : Error("non-finite evaluation: " + msg) {}
};

struct MissingBaseline : Error {
    explicit MissingBaseline(const std::string& msg) : Error("missing baseline: " + msg) {}
};

struct DivisionByZero : Error {
    explicit DivisionByZero(const std::string& msg) : Error("division by zero: " + msg) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error("config error: " + msg) {}
};

}  // namespace garchvi
