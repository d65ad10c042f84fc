#include "tempdisagg/errors.hpp"

#include <utility>

namespace tempdisagg {

Error::Error(std::string kind, ErrorCategory category, const std::string& message)
    : std::runtime_error(message), kind_(std::move(kind)), category_(category) {}

DomainError::DomainError(const std::string& message)
    : Error("DomainError", ErrorCategory::Validation, message) {}

ShapeError::ShapeError(const std::string& message)
    : Error("ShapeError", ErrorCategory::Validation, message) {}

ShapeError::ShapeError(const std::string& what, std::size_t expected, std::size_t found)
    : Error("ShapeError", ErrorCategory::Validation,
            what + ": expected " + std::to_string(expected) + ", found " +
                std::to_string(found)) {}

InvalidGrid::InvalidGrid(const std::string& message)
    : Error("InvalidGrid", ErrorCategory::Validation, message) {}

DimensionRegimeError::DimensionRegimeError(std::size_t n_low, std::size_t d)
    : Error("DimensionRegimeError", ErrorCategory::Validation,
            "classical disaggregation needs more low-frequency observations than "
            "indicators (n_low=" + std::to_string(n_low) + ", d=" + std::to_string(d) +
                "); use method spTD or adaptive-spTD") {}

ParseError::ParseError(const std::string& path, std::size_t line, std::size_t column,
                       const std::string& message)
    : Error("ParseError", ErrorCategory::Validation,
            path + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

IoError::IoError(const std::string& message)
    : Error("IoError", ErrorCategory::Validation, message) {}

NumericalError::NumericalError(const std::string& message)
    : Error("NumericalError", ErrorCategory::Numerical, message) {}

RankError::RankError(const std::string& message)
    : Error("RankError", ErrorCategory::Numerical, message) {}

DegenerateDesignError::DegenerateDesignError(const std::string& message)
    : Error("DegenerateDesignError", ErrorCategory::Numerical, message) {}

}  // namespace tempdisagg
