#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vsxc {

// Base for every error raised by the toolkit. Callers that only care about
// "something in the pipeline failed" can catch this one type.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

// A CSV cell that cannot be parsed. `row` is the 1-based data row (header excluded).
class ParseError : public Error {
public:
    ParseError(std::size_t row, const std::string& what)
        : Error("row " + std::to_string(row) + ": " + what), row_(row) {}
    [[nodiscard]] std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

class MonotonicityError : public Error {
public:
    MonotonicityError(std::size_t row, const std::string& what)
        : Error("row " + std::to_string(row) + ": " + what), row_(row) {}
    [[nodiscard]] std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

class ZeroDivisionError : public Error {
public:
    explicit ZeroDivisionError(std::size_t index)
        : Error("target element " + std::to_string(index) + " is zero; MAPE undefined"), index_(index) {}
    [[nodiscard]] std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

class NumericalError : public Error {
public:
    using Error::Error;
};

// Design matrix without full column rank.
class SingularMatrixError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

// Raised by the pipeline driver; carries the stage that failed.
class StageError : public Error {
public:
    StageError(std::string stage, const std::string& cause)
        : Error("[" + stage + "] " + cause), stage_(std::move(stage)) {}
    [[nodiscard]] const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

}  // namespace vsxc
