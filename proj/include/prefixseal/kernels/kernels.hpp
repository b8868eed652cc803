#pragma once

// Inner-loop kernels behind the AEAD and the password hash. Every family has
// a portable scalar reference; ISA-specific variants are compiled into their
// own translation units and selected at runtime from CPU features. Setting
// PREFIXSEAL_KERNELS=scalar in the environment pins the scalar references.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace prefixseal::kernels {

inline constexpr std::size_t kAesBlock = 16;
inline constexpr std::size_t kAes256Rounds = 14;

struct AesRoundKeys {
    alignas(16) std::array<std::uint8_t, (kAes256Rounds + 1) * kAesBlock> bytes{};
    ~AesRoundKeys();
};

// FIPS-197 AES-256 key schedule. The byte layout is what AES-NI consumes too.
void aes256_expand_key(const std::uint8_t key[32], AesRoundKeys& out) noexcept;

struct AesKernel {
    std::string_view name;
    bool (*available)() noexcept;
    void (*encrypt_blocks)(const AesRoundKeys& rk, const std::uint8_t* in, std::uint8_t* out,
                           std::size_t nblocks) noexcept;
    // out = in ^ keystream. The first four bytes of the counter block are a
    // little-endian 32-bit counter that wraps without carrying.
    void (*ctr32_le_xor)(const AesRoundKeys& rk, const std::uint8_t counter[16], const std::uint8_t* in,
                         std::uint8_t* out, std::size_t len) noexcept;
};

struct PolyvalKernel {
    std::string_view name;
    bool (*available)() noexcept;
    // state <- POLYVAL accumulation of nblocks full 16-byte blocks under key h.
    void (*absorb)(const std::uint8_t h[16], std::uint8_t state[16], const std::uint8_t* blocks,
                   std::size_t nblocks) noexcept;
};

inline constexpr std::size_t kArgon2BlockWords = 128;

struct alignas(64) Argon2Block {
    std::array<std::uint64_t, kArgon2BlockWords> v{};
};

struct Argon2Kernel {
    std::string_view name;
    bool (*available)() noexcept;
    // next = P(prev ^ ref) ^ prev ^ ref, additionally xored with the old next
    // when with_xor is set.
    void (*fill_block)(const Argon2Block& prev, const Argon2Block& ref, Argon2Block& next,
                       bool with_xor) noexcept;
};

// Every variant compiled into this binary, scalar first. Some may not be
// runnable on the current CPU; check available().
std::span<const AesKernel* const> aes_kernels() noexcept;
std::span<const PolyvalKernel* const> polyval_kernels() noexcept;
std::span<const Argon2Kernel* const> argon2_kernels() noexcept;

const AesKernel& default_aes() noexcept;
const PolyvalKernel& default_polyval() noexcept;
const Argon2Kernel& default_argon2() noexcept;

// Implementations, referenced by the registry.
namespace scalar {
extern const AesKernel aes;
extern const PolyvalKernel polyval;
extern const Argon2Kernel argon2;
} // namespace scalar

namespace x86 {
extern const AesKernel aesni;
extern const PolyvalKernel clmul;
extern const Argon2Kernel avx2;
} // namespace x86

} // namespace prefixseal::kernels
