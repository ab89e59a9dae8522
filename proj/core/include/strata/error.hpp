#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace strata {

enum class ErrorCode {
    invalid_argument,
    validation,
    not_found,
    provider_unavailable,
    io,
    parse,
    version,
    corruption,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library is an Error carrying a machine-readable
// code; callers switch on code() rather than on the dynamic type.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

// Config validation failure; field() names the offending config key.
class ValidationError : public Error {
public:
    ValidationError(std::string field, const std::string& message)
        : Error(ErrorCode::validation, field + ": " + message), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

class ProviderUnavailable : public Error {
public:
    explicit ProviderUnavailable(const std::string& message)
        : Error(ErrorCode::provider_unavailable, message) {}
};

[[noreturn]] void throw_invalid_argument(const std::string& message);
[[noreturn]] void throw_not_found(const std::string& message);

} // namespace strata
