#include "prefixseal/error.hpp"

namespace prefixseal {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::EmptyPassword: return "EmptyPassword";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::InvalidContext: return "InvalidContext";
    case ErrorCode::InvalidText: return "InvalidText";
    case ErrorCode::MalformedCiphertext: return "MalformedCiphertext";
    case ErrorCode::AuthenticationFailed: return "AuthenticationFailed";
    case ErrorCode::EmptyTerm: return "EmptyTerm";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
    case ErrorCode::UnknownField: return "UnknownField";
    case ErrorCode::NotEncryptedField: return "NotEncryptedField";
    case ErrorCode::UnknownUser: return "UnknownUser";
    case ErrorCode::InvalidSalt: return "InvalidSalt";
    case ErrorCode::InvalidCheckWords: return "InvalidCheckWords";
    case ErrorCode::ValidationFailed: return "ValidationFailed";
    case ErrorCode::MissingPassword: return "MissingPassword";
    case ErrorCode::WrongPassword: return "WrongPassword";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ServerError: return "ServerError";
    }
    return "Unknown";
}

std::string_view to_string(MalformedReason reason) noexcept {
    switch (reason) {
    case MalformedReason::none: return "none";
    case MalformedReason::bad_version: return "bad_version";
    case MalformedReason::bad_header: return "bad_header";
    case MalformedReason::bad_tag_width: return "bad_tag_width";
    case MalformedReason::bad_encoding: return "bad_encoding";
    case MalformedReason::bad_section_count: return "bad_section_count";
    }
    return "unknown";
}

std::optional<ErrorCode> error_code_from_string(std::string_view name) noexcept {
    for (int i = 0; i <= static_cast<int>(ErrorCode::ServerError); ++i) {
        const auto code = static_cast<ErrorCode>(i);
        if (to_string(code) == name) return code;
    }
    return std::nullopt;
}

namespace {
std::string compose(std::string_view name, const std::string& detail) {
    std::string msg(name);
    if (!detail.empty()) {
        msg += ": ";
        msg += detail;
    }
    return msg;
}
} // namespace

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(compose(to_string(code), detail)), code_(code) {}

Error::Error(MalformedReason reason, const std::string& detail)
    : std::runtime_error(compose(to_string(ErrorCode::MalformedCiphertext),
                                 std::string(to_string(reason)) + (detail.empty() ? "" : " (" + detail + ")"))),
      code_(ErrorCode::MalformedCiphertext), reason_(reason) {}

} // namespace prefixseal
