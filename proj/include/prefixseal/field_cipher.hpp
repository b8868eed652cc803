#pragma once

#include <string>
#include <string_view>

#include "prefixseal/crypto/aes_gcm_siv.hpp"
#include "prefixseal/field_codec.hpp"
#include "prefixseal/key_derivation.hpp"

namespace prefixseal {

// Immutable per-field encryption settings bound to a key ring. Safe to share
// across threads.
class EncryptionContext {
public:
    EncryptionContext(const KeyRing& ring, FieldId field, unsigned pref_len,
                      std::size_t token_width = kDefaultTokenWidth);

    const FieldId& field() const noexcept { return field_; }
    unsigned pref_len() const noexcept { return pref_len_; }
    std::size_t token_width() const noexcept { return token_width_; }

    const crypto::AesGcmSiv& prefix_cipher() const noexcept { return prefix_; }
    const crypto::AesGcmSiv& body_cipher() const noexcept { return body_; }

private:
    FieldId field_;
    unsigned pref_len_;
    std::size_t token_width_;
    crypto::AesGcmSiv prefix_;
    crypto::AesGcmSiv body_;
};

// Deterministic tags: token i is the leading token_width bytes of
// AES-GCM-SIV(k_prefix, zero nonce, chars[i], field || 0x1F || BE32(i) || 0x1F || chars[0..i)).
std::vector<PrefixToken> make_prefix_tags(const EncryptionContext& ctx, std::u32string_view chars);

std::string encrypt_text(const EncryptionContext& ctx, std::string_view text);

// Throws MalformedCiphertext on structure, AuthenticationFailed on any key
// mismatch or tampering.
std::string decrypt_text(const EncryptionContext& ctx, std::string_view serialized);

// Header plus tags of the first pref_len characters of the normalized term.
// Throws EmptyTerm.
std::string make_query_token(const EncryptionContext& ctx, std::string_view term);

namespace detail {
// body = nonce || AEAD(cipher, nonce, plaintext, head); returned base64url.
std::string seal_body(const crypto::AesGcmSiv& cipher, std::string_view head, std::string_view plaintext);
std::string open_body(const crypto::AesGcmSiv& cipher, std::string_view head, ByteView body);
} // namespace detail

} // namespace prefixseal
