#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace prefixseal {

enum class ErrorCode {
    EmptyPassword,
    InvalidParams,
    InvalidContext,
    InvalidText,
    MalformedCiphertext,
    AuthenticationFailed,
    EmptyTerm,
    SchemaViolation,
    UnknownField,
    NotEncryptedField,
    UnknownUser,
    InvalidSalt,
    InvalidCheckWords,
    ValidationFailed,
    MissingPassword,
    WrongPassword,
    IoError,
    ServerError,
};

// Structural reasons a serialized ciphertext is rejected by the parser.
enum class MalformedReason {
    none,
    bad_version,
    bad_header,
    bad_tag_width,
    bad_encoding,
    bad_section_count,
};

std::string_view to_string(ErrorCode code) noexcept;
std::string_view to_string(MalformedReason reason) noexcept;

// Inverse of to_string for wire error codes; nullopt for unknown names.
std::optional<ErrorCode> error_code_from_string(std::string_view name) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& detail);
    Error(MalformedReason reason, const std::string& detail);

    ErrorCode code() const noexcept { return code_; }
    MalformedReason reason() const noexcept { return reason_; }

private:
    ErrorCode code_;
    MalformedReason reason_ = MalformedReason::none;
};

} // namespace prefixseal
