#pragma once

#include <optional>

#include "prefixseal/bytes.hpp"
#include "prefixseal/kernels/kernels.hpp"

namespace prefixseal::crypto {

struct GcmSivKernels {
    const kernels::AesKernel* aes = &kernels::default_aes();
    const kernels::PolyvalKernel* polyval = &kernels::default_polyval();
};

// AES-256-GCM-SIV (RFC 8452). Nonce-misuse resistant: a repeated
// (nonce, aad, plaintext) triple yields the same output and leaks only that.
class AesGcmSiv {
public:
    static constexpr std::size_t kKeySize = 32;
    static constexpr std::size_t kNonceSize = 12;
    static constexpr std::size_t kTagSize = 16;

    explicit AesGcmSiv(ByteView key, GcmSivKernels kernels = {});

    // Returns ciphertext || tag.
    Bytes seal(ByteView nonce, ByteView plaintext, ByteView aad) const;

    // nullopt when the tag does not verify; no plaintext is released then.
    std::optional<Bytes> open(ByteView nonce, ByteView sealed, ByteView aad) const;

private:
    struct PerNonceKeys;
    void derive(ByteView nonce, PerNonceKeys& out) const;
    void compute_tag(const PerNonceKeys& keys, ByteView nonce, ByteView plaintext, ByteView aad,
                     std::uint8_t tag[16]) const;

    kernels::AesRoundKeys key_generating_key_;
    GcmSivKernels kernels_;
};

} // namespace prefixseal::crypto
