#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "prefixseal/bytes.hpp"

namespace prefixseal {

using Salt = std::array<std::uint8_t, 16>;

// Argon2id cost profile plus the per-user salt.
struct KdfParams {
    static constexpr std::size_t output_length = 32;

    std::uint32_t memory_cost_kib = 65536;
    std::uint32_t time_cost = 3;
    std::uint32_t parallelism = 1;
    Salt salt{};

    // Throws InvalidParams: time_cost >= 1, parallelism >= 1,
    // memory_cost_kib >= 8 * parallelism.
    void validate() const;
};

// Session secrets. Each subkey has its own HKDF label, so no two uses share
// an AES key.
struct KeyRing {
    SecretKey master;
    SecretKey prefix;
    SecretKey body;
    SecretKey check;
};

inline constexpr std::string_view kPrefixLabel = "prefixseal/v1/prefix";
inline constexpr std::string_view kBodyLabel = "prefixseal/v1/body";
inline constexpr std::string_view kCheckLabel = "prefixseal/v1/check";

// The optional pepper is an application-wide secret appended to the password
// bytes before hashing.
SecretKey derive_master_key(std::string_view password, const KdfParams& params, std::string_view pepper = {});
KeyRing derive_subkeys(const SecretKey& master);
KeyRing derive_keyring(std::string_view password, const KdfParams& params, std::string_view pepper = {});

Salt generate_salt();
std::string salt_to_hex(const Salt& salt);
std::optional<Salt> salt_from_hex(std::string_view hex);

inline constexpr std::array<std::string_view, 3> kCheckWords = {"check-alpha", "check-beta", "check-gamma"};
inline constexpr std::string_view kCheckFieldId = "__check__";

struct CheckWordSet {
    std::vector<std::string> words;
    friend bool operator==(const CheckWordSet&, const CheckWordSet&) = default;
};

// Fresh ciphertexts of the canonical words at prefix length 0.
CheckWordSet make_check_words(const KeyRing& ring);

// True iff every stored word opens under ring and equals its canonical word.
// Wrong keys yield false; only structurally broken entries throw
// MalformedCiphertext.
bool verify_password(const KeyRing& ring, const CheckWordSet& stored);

} // namespace prefixseal
