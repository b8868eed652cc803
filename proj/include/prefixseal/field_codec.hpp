#pragma once

// Text canonicalization and the "v1" wire grammar every client and the
// record store agree on:
//
//   v1 "." HEX2(pref_len) "." base64url(tag_0) ... base64url(tag_k-1) "." base64url(nonce || body)
//
// base64url is unpadded; "." is outside its alphabet, so a server can match a
// query token with a plain starts-with test.

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "prefixseal/bytes.hpp"

namespace prefixseal {

inline constexpr std::string_view kWireVersion = "v1";
inline constexpr std::size_t kDefaultTokenWidth = 3;
inline constexpr std::size_t kMaxTokenWidth = 16;
inline constexpr unsigned kMaxPrefixLength = 255;
inline constexpr std::size_t kBodyNonceSize = 12;
inline constexpr std::size_t kBodyTagSize = 16;

// Identifier of a form field: 1..64 characters of [A-Za-z0-9_].
class FieldId {
public:
    explicit FieldId(std::string id);

    static bool is_valid(std::string_view id) noexcept;

    const std::string& str() const noexcept { return id_; }
    friend bool operator==(const FieldId&, const FieldId&) = default;

private:
    std::string id_;
};

class PrefixToken {
public:
    PrefixToken() = default;
    explicit PrefixToken(ByteView bytes);

    ByteView bytes() const noexcept { return ByteView(bytes_.data(), width_); }
    std::size_t width() const noexcept { return width_; }

    friend bool operator==(const PrefixToken& a, const PrefixToken& b) noexcept {
        return a.width_ == b.width_ && a.bytes_ == b.bytes_;
    }

private:
    std::array<std::uint8_t, kMaxTokenWidth> bytes_{};
    std::size_t width_ = 0;
};

struct FieldCiphertext {
    unsigned declared_pref_len = 0;
    std::vector<PrefixToken> prefix_tags;
    Bytes body; // nonce || AEAD ciphertext || tag

    friend bool operator==(const FieldCiphertext&, const FieldCiphertext&) = default;
};

// Strict UTF-8 check: no overlong forms, no surrogates, nothing past U+10FFFF.
bool is_valid_utf8(std::string_view s) noexcept;
std::u32string decode_utf8(std::string_view s);
std::string encode_utf8(std::u32string_view s);
std::string encode_utf8(char32_t c);

// NFC normalization. Throws InvalidText on ill-formed UTF-8.
std::string normalize(std::string_view raw);

struct Partition {
    std::u32string prefix;
    std::size_t effective_k = 0;
};

// First min(pref_len, length) Unicode scalar values of already-normalized text.
Partition partition(std::string_view normalized, unsigned pref_len);

std::string base64url_encode(ByteView data);
// Strict decoding: padding or non-zero trailing bits make it fail.
std::optional<Bytes> base64url_decode(std::string_view text);
constexpr std::size_t base64url_length(std::size_t bytes) noexcept { return (bytes * 4 + 2) / 3; }

// "v1.HH.": the header plus its trailing separator.
std::string wire_header(unsigned pref_len);
std::string encode_tags(const std::vector<PrefixToken>& tags);

std::string serialize(const FieldCiphertext& ct);
FieldCiphertext parse(std::string_view text, std::size_t token_width = kDefaultTokenWidth);

// Everything in front of the body section, separator included. This is the
// associated data the body is sealed under.
std::string_view authenticated_head(std::string_view serialized) noexcept;

} // namespace prefixseal
