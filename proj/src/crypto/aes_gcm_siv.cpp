#include "prefixseal/crypto/aes_gcm_siv.hpp"

#include <cstring>

#include "prefixseal/error.hpp"

namespace prefixseal::crypto {

namespace {
constexpr std::uint64_t kMaxInput = std::uint64_t{1} << 36;
}

struct AesGcmSiv::PerNonceKeys {
    std::uint8_t auth[16];
    kernels::AesRoundKeys enc;
    ~PerNonceKeys() { secure_wipe(auth, sizeof auth); }
};

AesGcmSiv::AesGcmSiv(ByteView key, GcmSivKernels kernels) : kernels_(kernels) {
    if (key.size() != kKeySize) throw Error(ErrorCode::InvalidParams, "AES-GCM-SIV key must be 32 bytes");
    kernels::aes256_expand_key(key.data(), key_generating_key_);
}

void AesGcmSiv::derive(ByteView nonce, PerNonceKeys& out) const {
    std::uint8_t in[6 * 16] = {};
    std::uint8_t blocks[6 * 16];
    for (std::uint8_t i = 0; i < 6; ++i) {
        in[16 * i] = i;
        std::memcpy(in + 16 * i + 4, nonce.data(), kNonceSize);
    }
    kernels_.aes->encrypt_blocks(key_generating_key_, in, blocks, 6);
    std::memcpy(out.auth, blocks, 8);
    std::memcpy(out.auth + 8, blocks + 16, 8);
    std::uint8_t enc_key[32];
    for (int i = 0; i < 4; ++i) std::memcpy(enc_key + 8 * i, blocks + 16 * (i + 2), 8);
    kernels::aes256_expand_key(enc_key, out.enc);
    secure_wipe(enc_key, sizeof enc_key);
    secure_wipe(blocks, sizeof blocks);
}

void AesGcmSiv::compute_tag(const PerNonceKeys& keys, ByteView nonce, ByteView plaintext, ByteView aad,
                            std::uint8_t tag[16]) const {
    std::uint8_t s[16] = {};
    auto absorb_padded = [&](ByteView data) {
        const std::size_t full = data.size() / 16;
        if (full != 0) kernels_.polyval->absorb(keys.auth, s, data.data(), full);
        const std::size_t rest = data.size() % 16;
        if (rest != 0) {
            std::uint8_t last[16] = {};
            std::memcpy(last, data.data() + 16 * full, rest);
            kernels_.polyval->absorb(keys.auth, s, last, 1);
            secure_wipe(last, sizeof last);
        }
    };
    absorb_padded(aad);
    absorb_padded(plaintext);
    std::uint8_t lengths[16];
    const std::uint64_t aad_bits = static_cast<std::uint64_t>(aad.size()) * 8;
    const std::uint64_t pt_bits = static_cast<std::uint64_t>(plaintext.size()) * 8;
    for (int i = 0; i < 8; ++i) {
        lengths[i] = static_cast<std::uint8_t>(aad_bits >> (8 * i));
        lengths[8 + i] = static_cast<std::uint8_t>(pt_bits >> (8 * i));
    }
    kernels_.polyval->absorb(keys.auth, s, lengths, 1);
    for (std::size_t i = 0; i < kNonceSize; ++i) s[i] ^= nonce[i];
    s[15] &= 0x7f;
    kernels_.aes->encrypt_blocks(keys.enc, s, tag, 1);
    secure_wipe(s, sizeof s);
}

Bytes AesGcmSiv::seal(ByteView nonce, ByteView plaintext, ByteView aad) const {
    if (nonce.size() != kNonceSize) throw Error(ErrorCode::InvalidParams, "nonce must be 12 bytes");
    if (plaintext.size() > kMaxInput || aad.size() > kMaxInput)
        throw Error(ErrorCode::InvalidParams, "input exceeds 2^36 bytes");
    PerNonceKeys keys;
    derive(nonce, keys);
    Bytes out(plaintext.size() + kTagSize);
    std::uint8_t* tag = out.data() + plaintext.size();
    compute_tag(keys, nonce, plaintext, aad, tag);
    std::uint8_t counter[16];
    std::memcpy(counter, tag, 16);
    counter[15] |= 0x80;
    kernels_.aes->ctr32_le_xor(keys.enc, counter, plaintext.data(), out.data(), plaintext.size());
    return out;
}

std::optional<Bytes> AesGcmSiv::open(ByteView nonce, ByteView sealed, ByteView aad) const {
    if (nonce.size() != kNonceSize) throw Error(ErrorCode::InvalidParams, "nonce must be 12 bytes");
    if (sealed.size() < kTagSize || sealed.size() - kTagSize > kMaxInput || aad.size() > kMaxInput)
        return std::nullopt;
    const std::size_t n = sealed.size() - kTagSize;
    const std::uint8_t* tag = sealed.data() + n;
    PerNonceKeys keys;
    derive(nonce, keys);
    std::uint8_t counter[16];
    std::memcpy(counter, tag, 16);
    counter[15] |= 0x80;
    Bytes plain(n);
    kernels_.aes->ctr32_le_xor(keys.enc, counter, sealed.data(), plain.data(), n);
    std::uint8_t expected[16];
    compute_tag(keys, nonce, plain, aad, expected);
    if (!constant_time_equal(ByteView(expected, 16), ByteView(tag, 16))) {
        secure_wipe(plain.data(), plain.size());
        return std::nullopt;
    }
    return plain;
}

} // namespace prefixseal::crypto
