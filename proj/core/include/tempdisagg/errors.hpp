#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tempdisagg {

/// Broad failure class, used by the CLI to pick an exit status.
enum class ErrorCategory { Validation, Numerical };

/// Base of every error raised by the library. `kind()` is a stable
/// machine-readable tag (e.g. "ShapeError") used in error records.
class Error : public std::runtime_error {
public:
    Error(std::string kind, ErrorCategory category, const std::string& message);

    [[nodiscard]] const std::string& kind() const noexcept { return kind_; }
    [[nodiscard]] ErrorCategory category() const noexcept { return category_; }

private:
    std::string kind_;
    ErrorCategory category_;
};

class DomainError : public Error {
public:
    explicit DomainError(const std::string& message);
};

class ShapeError : public Error {
public:
    explicit ShapeError(const std::string& message);
    ShapeError(const std::string& what, std::size_t expected, std::size_t found);
};

class InvalidGrid : public Error {
public:
    explicit InvalidGrid(const std::string& message);
};

/// The low-frequency sample cannot support a classical (unpenalized) fit.
class DimensionRegimeError : public Error {
public:
    DimensionRegimeError(std::size_t n_low, std::size_t d);
};

class ParseError : public Error {
public:
    ParseError(const std::string& path, std::size_t line, std::size_t column,
               const std::string& message);

    [[nodiscard]] std::size_t line() const noexcept { return line_; }
    [[nodiscard]] std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/// File could not be opened, read or written.
class IoError : public Error {
public:
    explicit IoError(const std::string& message);
};

/// Cholesky pivot at or below the positivity threshold.
class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& message);
};

/// Whitened design is column-rank deficient.
class RankError : public Error {
public:
    explicit RankError(const std::string& message);
};

/// Two LARS candidates are (numerically) collinear with the active set.
class DegenerateDesignError : public Error {
public:
    explicit DegenerateDesignError(const std::string& message);
};

}  // namespace tempdisagg
