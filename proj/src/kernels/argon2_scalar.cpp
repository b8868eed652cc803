#include "prefixseal/kernels/kernels.hpp"

namespace prefixseal::kernels {

namespace {

constexpr std::uint64_t rotr(std::uint64_t x, int n) noexcept { return (x >> n) | (x << (64 - n)); }

constexpr std::uint64_t blamka(std::uint64_t x, std::uint64_t y) noexcept {
    return x + y + 2 * (x & 0xffffffffULL) * (y & 0xffffffffULL);
}

inline void g(std::uint64_t& a, std::uint64_t& b, std::uint64_t& c, std::uint64_t& d) noexcept {
    a = blamka(a, b);
    d = rotr(d ^ a, 32);
    c = blamka(c, d);
    b = rotr(b ^ c, 24);
    a = blamka(a, b);
    d = rotr(d ^ a, 16);
    c = blamka(c, d);
    b = rotr(b ^ c, 63);
}

// BLAKE2b round without message words, over 16 words addressed through idx.
inline void permute(std::uint64_t* w, const int (&idx)[16]) noexcept {
    auto v = [&](int i) -> std::uint64_t& { return w[idx[i]]; };
    g(v(0), v(4), v(8), v(12));
    g(v(1), v(5), v(9), v(13));
    g(v(2), v(6), v(10), v(14));
    g(v(3), v(7), v(11), v(15));
    g(v(0), v(5), v(10), v(15));
    g(v(1), v(6), v(11), v(12));
    g(v(2), v(7), v(8), v(13));
    g(v(3), v(4), v(9), v(14));
}

bool always() noexcept { return true; }

void fill_block(const Argon2Block& prev, const Argon2Block& ref, Argon2Block& next, bool with_xor) noexcept {
    Argon2Block r;
    Argon2Block tmp;
    for (std::size_t i = 0; i < kArgon2BlockWords; ++i) {
        r.v[i] = prev.v[i] ^ ref.v[i];
        tmp.v[i] = with_xor ? r.v[i] ^ next.v[i] : r.v[i];
    }
    for (int row = 0; row < 8; ++row) {
        int idx[16];
        for (int j = 0; j < 16; ++j) idx[j] = 16 * row + j;
        permute(r.v.data(), idx);
    }
    for (int col = 0; col < 8; ++col) {
        int idx[16];
        for (int j = 0; j < 8; ++j) {
            idx[2 * j] = 2 * col + 16 * j;
            idx[2 * j + 1] = 2 * col + 16 * j + 1;
        }
        permute(r.v.data(), idx);
    }
    for (std::size_t i = 0; i < kArgon2BlockWords; ++i) next.v[i] = tmp.v[i] ^ r.v[i];
}

} // namespace

namespace scalar {
const Argon2Kernel argon2{"scalar", &always, &fill_block};
} // namespace scalar

} // namespace prefixseal::kernels
