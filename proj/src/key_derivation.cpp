#include "prefixseal/key_derivation.hpp"

#include "prefixseal/crypto/argon2.hpp"
#include "prefixseal/crypto/hkdf.hpp"
#include "prefixseal/error.hpp"
#include "prefixseal/field_cipher.hpp"

namespace prefixseal {

void KdfParams::validate() const {
    if (time_cost < 1) throw Error(ErrorCode::InvalidParams, "time_cost must be >= 1");
    if (parallelism < 1 || parallelism > 0xFFFFFFu) throw Error(ErrorCode::InvalidParams, "parallelism out of range");
    if (static_cast<std::uint64_t>(memory_cost_kib) < 8ULL * parallelism)
        throw Error(ErrorCode::InvalidParams, "memory_cost must be >= 8 * parallelism KiB");
}

SecretKey derive_master_key(std::string_view password, const KdfParams& params, std::string_view pepper) {
    if (password.empty()) throw Error(ErrorCode::EmptyPassword, "");
    params.validate();
    SecretBytes secret(as_bytes(password));
    secret.append(as_bytes(pepper));
    crypto::Argon2Params costs;
    costs.time_cost = params.time_cost;
    costs.memory_cost_kib = params.memory_cost_kib;
    costs.parallelism = params.parallelism;
    costs.tag_length = KdfParams::output_length;
    Bytes tag = crypto::argon2id({.password = secret.view(), .salt = params.salt}, costs);
    SecretKey key(tag);
    secure_wipe(tag.data(), tag.size());
    return key;
}

KeyRing derive_subkeys(const SecretKey& master) {
    KeyRing ring;
    ring.master = master;
    crypto::hkdf_sha256(master.view(), {}, as_bytes(kPrefixLabel), ring.prefix.span());
    crypto::hkdf_sha256(master.view(), {}, as_bytes(kBodyLabel), ring.body.span());
    crypto::hkdf_sha256(master.view(), {}, as_bytes(kCheckLabel), ring.check.span());
    return ring;
}

KeyRing derive_keyring(std::string_view password, const KdfParams& params, std::string_view pepper) {
    return derive_subkeys(derive_master_key(password, params, pepper));
}

Salt generate_salt() {
    Salt s;
    random_bytes(s);
    return s;
}

std::string salt_to_hex(const Salt& salt) { return hex_encode(salt); }

std::optional<Salt> salt_from_hex(std::string_view hex) {
    auto raw = hex_decode(hex);
    if (!raw || raw->size() != Salt{}.size()) return std::nullopt;
    Salt s;
    std::copy(raw->begin(), raw->end(), s.begin());
    return s;
}

namespace {
// Check-words are field ciphertexts at prefix length 0 whose body is sealed
// under k_check.
const std::string& check_head() {
    static const std::string head = wire_header(0) + ".";
    return head;
}
} // namespace

CheckWordSet make_check_words(const KeyRing& ring) {
    const crypto::AesGcmSiv cipher(ring.check.view());
    CheckWordSet set;
    for (auto word : kCheckWords) set.words.push_back(check_head() + detail::seal_body(cipher, check_head(), word));
    return set;
}

bool verify_password(const KeyRing& ring, const CheckWordSet& stored) {
    std::vector<FieldCiphertext> parsed;
    parsed.reserve(stored.words.size());
    for (const auto& w : stored.words) parsed.push_back(parse(w));
    if (stored.words.size() != kCheckWords.size()) return false;
    const crypto::AesGcmSiv cipher(ring.check.view());
    bool ok = true;
    for (std::size_t i = 0; i < parsed.size(); ++i) {
        if (parsed[i].declared_pref_len != 0 || !parsed[i].prefix_tags.empty()) {
            ok = false;
            continue;
        }
        try {
            const std::string plain = detail::open_body(cipher, authenticated_head(stored.words[i]), parsed[i].body);
            ok = ok && plain == kCheckWords[i];
        } catch (const Error& e) {
            if (e.code() != ErrorCode::AuthenticationFailed) throw;
            ok = false;
        }
    }
    return ok;
}

} // namespace prefixseal
