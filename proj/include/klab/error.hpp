#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace klab {

enum class ErrorKind {
    // expression parsing and evaluation
    UnbalancedParen,
    UnknownIdentifier,
    UnexpectedToken,
    EmptyInput,
    DomainError,
    // grids and fields
    GridMismatch,
    InvalidGrid,
    FieldFormat,
    // linear algebra
    NonPositiveWeight,
    NoConvergence,
    NotPositiveDefinite,
    DimensionMismatch,
    // nonlocal problem
    NonPositiveCoefficient,
    NegativeS,
    SingularJacobian,
    CheckFailed,
    // eigenproblem and certificates
    NotInAdmissibleSet,
    SignChange,
    ZeroDenominator,
    ConstantC,
    NonPositiveC,
    ConstructionFailed,
    // configuration and generic argument checks
    Config,
    InvalidArgument,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind), message_(message) {}

    ErrorKind kind() const noexcept { return kind_; }
    /// The message without the kind prefix.
    const std::string& message() const noexcept { return message_; }

private:
    ErrorKind kind_;
    std::string message_;
};

/// Parse failure at a byte offset of the source text.
class ParseError : public Error {
public:
    ParseError(ErrorKind kind, std::size_t offset, const std::string& message)
        : Error(kind, message + " at offset " + std::to_string(offset)), offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

}  // namespace klab
