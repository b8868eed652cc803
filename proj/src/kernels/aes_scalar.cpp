#include <cstring>

#include "prefixseal/bytes.hpp"
#include "prefixseal/kernels/kernels.hpp"

namespace prefixseal::kernels {

namespace {

constexpr std::uint8_t xtime(std::uint8_t x) noexcept {
    return static_cast<std::uint8_t>((x << 1) ^ ((x & 0x80) ? 0x1b : 0x00));
}

constexpr std::uint8_t gf_mul(std::uint8_t a, std::uint8_t b) noexcept {
    std::uint8_t r = 0;
    while (b != 0) {
        if (b & 1) r ^= a;
        a = xtime(a);
        b >>= 1;
    }
    return r;
}

constexpr std::uint8_t rotl8(std::uint8_t x, int n) noexcept {
    return static_cast<std::uint8_t>((x << n) | (x >> (8 - n)));
}

// S-box from its definition: multiplicative inverse in GF(2^8) followed by
// the affine map.
constexpr std::array<std::uint8_t, 256> make_sbox() noexcept {
    std::array<std::uint8_t, 256> box{};
    for (int x = 0; x < 256; ++x) {
        std::uint8_t inv = 0;
        if (x != 0) {
            std::uint8_t p = static_cast<std::uint8_t>(x);
            std::uint8_t acc = 1;
            for (int e = 254; e != 0; e >>= 1) {
                if (e & 1) acc = gf_mul(acc, p);
                p = gf_mul(p, p);
            }
            inv = acc;
        }
        box[x] = static_cast<std::uint8_t>(inv ^ rotl8(inv, 1) ^ rotl8(inv, 2) ^ rotl8(inv, 3) ^
                                           rotl8(inv, 4) ^ 0x63);
    }
    return box;
}

constexpr auto kSbox = make_sbox();
static_assert(kSbox[0x00] == 0x63 && kSbox[0x53] == 0xed && kSbox[0xff] == 0x16);

// Reference kernel. Table lookups are not constant-time; the AES-NI variant
// is preferred whenever the CPU has it.
void encrypt_block(const AesRoundKeys& rk, const std::uint8_t in[16], std::uint8_t out[16]) noexcept {
    std::uint8_t s[16];
    for (int i = 0; i < 16; ++i) s[i] = in[i] ^ rk.bytes[i];
    for (std::size_t round = 1; round <= kAes256Rounds; ++round) {
        std::uint8_t t[16];
        // SubBytes + ShiftRows; state is column-major (row r, column c at r + 4c).
        for (int c = 0; c < 4; ++c)
            for (int r = 0; r < 4; ++r) t[r + 4 * c] = kSbox[s[r + 4 * ((c + r) & 3)]];
        if (round != kAes256Rounds) {
            for (int c = 0; c < 4; ++c) {
                std::uint8_t* col = t + 4 * c;
                const std::uint8_t a0 = col[0], a1 = col[1], a2 = col[2], a3 = col[3];
                const std::uint8_t all = a0 ^ a1 ^ a2 ^ a3;
                col[0] = a0 ^ all ^ xtime(a0 ^ a1);
                col[1] = a1 ^ all ^ xtime(a1 ^ a2);
                col[2] = a2 ^ all ^ xtime(a2 ^ a3);
                col[3] = a3 ^ all ^ xtime(a3 ^ a0);
            }
        }
        const std::uint8_t* k = rk.bytes.data() + round * kAesBlock;
        for (int i = 0; i < 16; ++i) s[i] = t[i] ^ k[i];
    }
    std::memcpy(out, s, 16);
    secure_wipe(s, sizeof s);
}

bool always() noexcept { return true; }

void encrypt_blocks(const AesRoundKeys& rk, const std::uint8_t* in, std::uint8_t* out,
                    std::size_t nblocks) noexcept {
    for (std::size_t i = 0; i < nblocks; ++i) encrypt_block(rk, in + i * 16, out + i * 16);
}

void ctr32_le_xor(const AesRoundKeys& rk, const std::uint8_t counter[16], const std::uint8_t* in,
                  std::uint8_t* out, std::size_t len) noexcept {
    std::uint8_t block[16];
    std::uint8_t stream[16];
    std::memcpy(block, counter, 16);
    std::uint32_t ctr = static_cast<std::uint32_t>(block[0]) | (static_cast<std::uint32_t>(block[1]) << 8) |
                        (static_cast<std::uint32_t>(block[2]) << 16) | (static_cast<std::uint32_t>(block[3]) << 24);
    for (std::size_t off = 0; off < len; off += 16) {
        block[0] = static_cast<std::uint8_t>(ctr);
        block[1] = static_cast<std::uint8_t>(ctr >> 8);
        block[2] = static_cast<std::uint8_t>(ctr >> 16);
        block[3] = static_cast<std::uint8_t>(ctr >> 24);
        encrypt_block(rk, block, stream);
        const std::size_t n = len - off < 16 ? len - off : 16;
        for (std::size_t j = 0; j < n; ++j) out[off + j] = in[off + j] ^ stream[j];
        ++ctr;
    }
    secure_wipe(stream, sizeof stream);
}

} // namespace

AesRoundKeys::~AesRoundKeys() { secure_wipe(bytes.data(), bytes.size()); }

void aes256_expand_key(const std::uint8_t key[32], AesRoundKeys& out) noexcept {
    std::uint8_t* w = out.bytes.data();
    std::memcpy(w, key, 32);
    std::uint8_t rcon = 0x01;
    for (std::size_t i = 8; i < 4 * (kAes256Rounds + 1); ++i) {
        std::uint8_t t[4];
        std::memcpy(t, w + 4 * (i - 1), 4);
        if (i % 8 == 0) {
            const std::uint8_t first = t[0];
            t[0] = static_cast<std::uint8_t>(kSbox[t[1]] ^ rcon);
            t[1] = kSbox[t[2]];
            t[2] = kSbox[t[3]];
            t[3] = kSbox[first];
            rcon = xtime(rcon);
        } else if (i % 8 == 4) {
            for (auto& b : t) b = kSbox[b];
        }
        for (int j = 0; j < 4; ++j) w[4 * i + j] = w[4 * (i - 8) + j] ^ t[j];
    }
}

namespace scalar {
const AesKernel aes{"scalar", &always, &encrypt_blocks, &ctr32_le_xor};
} // namespace scalar

} // namespace prefixseal::kernels
