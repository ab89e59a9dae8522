#include "strata/error.hpp"

namespace strata {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::validation: return "validation";
    case ErrorCode::not_found: return "not_found";
    case ErrorCode::provider_unavailable: return "provider_unavailable";
    case ErrorCode::io: return "io";
    case ErrorCode::parse: return "parse";
    case ErrorCode::version: return "version";
    case ErrorCode::corruption: return "corruption";
    }
    return "unknown";
}

void throw_invalid_argument(const std::string& message) {
    throw Error(ErrorCode::invalid_argument, message);
}

void throw_not_found(const std::string& message) {
    throw Error(ErrorCode::not_found, message);
}

} // namespace strata
