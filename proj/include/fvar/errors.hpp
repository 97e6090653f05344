#pragma once

#include <stdexcept>
#include <string>

namespace fvar {

/// Base class for all toolkit errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Argument outside its mathematical domain (alpha, beta, tau ranges, ...).
struct DomainError : Error {
    explicit DomainError(const std::string& msg) : Error(msg) {}
};

/// Expression text could not be parsed; `offset` is the byte position.
struct ParseError : Error {
    ParseError(const std::string& msg, std::size_t offset_)
        : Error(msg + " (at offset " + std::to_string(offset_) + ")"), offset(offset_) {}
    std::size_t offset;
};

/// Runtime evaluation failure; carries the offending subexpression.
struct EvalError : Error {
    EvalError(const std::string& msg, std::string subexpr_)
        : Error(msg + " in '" + subexpr_ + "'"), subexpr(std::move(subexpr_)) {}
    std::string subexpr;
};

/// Problem-file validation failure; names the offending field.
struct ValidationError : Error {
    ValidationError(std::string field_, const std::string& msg)
        : Error("field '" + field_ + "': " + msg), field(std::move(field_)) {}
    std::string field;
};

} // namespace fvar
