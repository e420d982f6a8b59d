#pragma once

/// @file error.hpp
/// Exception hierarchy shared by every ncq module.
///
/// All library failures derive from ncq::Error so callers (the CLI in
/// particular) can map whole families onto exit codes:
///   InvalidInput            bad arguments (non-finite seed, a >= b, m4 < 0)
///   DomainError / PoleError evaluation outside the integrand's domain
///   ParseError              malformed expression text, carries a byte offset
///   NumericalError          oracle failures and ill-conditioned fits

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ncq {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

/// Division by a value that is exactly zero.
class PoleError : public DomainError {
public:
    using DomainError::DomainError;
};

enum class ParseErrorKind {
    UnexpectedToken,
    UnbalancedParenthesis,
    UnknownFunction,
    TrailingInput,
    EmptyInput,
};

inline const char* to_string(ParseErrorKind kind) {
    switch (kind) {
    case ParseErrorKind::UnexpectedToken: return "unexpected token";
    case ParseErrorKind::UnbalancedParenthesis: return "unbalanced parenthesis";
    case ParseErrorKind::UnknownFunction: return "unknown function";
    case ParseErrorKind::TrailingInput: return "trailing input";
    case ParseErrorKind::EmptyInput: return "empty input";
    }
    return "parse error";
}

class ParseError : public Error {
public:
    ParseError(ParseErrorKind kind, std::size_t offset, const std::string& detail)
        : Error(std::string(to_string(kind)) + " at offset " + std::to_string(offset) +
                (detail.empty() ? std::string() : ": " + detail)),
          kind_(kind), offset_(offset) {}

    ParseErrorKind kind() const noexcept { return kind_; }
    std::size_t offset() const noexcept { return offset_; }

private:
    ParseErrorKind kind_;
    std::size_t offset_;
};

class NumericalError : public Error {
public:
    using Error::Error;
};

/// Reference integral did not settle before the panel cap.
class OracleFailure : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class IllConditioned : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class InsufficientPrecision : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class DegenerateFit : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// A verification identity that must hold exactly did not.
class VerificationFailure : public NumericalError {
public:
    using NumericalError::NumericalError;
};

} // namespace ncq
