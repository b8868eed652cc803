#include <cstring>

#include "prefixseal/kernels/kernels.hpp"

namespace prefixseal::kernels {

namespace {

// Field elements of GF(2^128) mod x^128 + x^127 + x^126 + x^121 + 1, stored
// little-endian: bit i of the 128-bit integer is the coefficient of x^i.
struct Elem {
    std::uint64_t lo = 0;
    std::uint64_t hi = 0;
};

constexpr std::uint64_t kReduceHi = 0xC200000000000000ULL;

Elem load(const std::uint8_t* p) noexcept {
    Elem e;
    for (int i = 7; i >= 0; --i) {
        e.lo = (e.lo << 8) | p[i];
        e.hi = (e.hi << 8) | p[8 + i];
    }
    return e;
}

void store(Elem e, std::uint8_t* p) noexcept {
    for (int i = 0; i < 8; ++i) {
        p[i] = static_cast<std::uint8_t>(e.lo >> (8 * i));
        p[8 + i] = static_cast<std::uint8_t>(e.hi >> (8 * i));
    }
}

Elem mul_x(Elem e) noexcept {
    const std::uint64_t mask = 0 - (e.hi >> 63);
    e.hi = (e.hi << 1) | (e.lo >> 63);
    e.lo <<= 1;
    e.hi ^= mask & kReduceHi;
    e.lo ^= mask & 1;
    return e;
}

Elem div_x(Elem e) noexcept {
    const std::uint64_t mask = 0 - (e.lo & 1);
    e.lo ^= mask & 1;
    e.hi ^= mask & kReduceHi;
    e.lo = (e.lo >> 1) | (e.hi << 63);
    e.hi = (e.hi >> 1) | (mask & 0x8000000000000000ULL);
    return e;
}

// a * b mod P, bit-serial with masks instead of branches.
Elem mul(Elem a, Elem b) noexcept {
    Elem r;
    for (int i = 127; i >= 0; --i) {
        r = mul_x(r);
        const std::uint64_t bit = i >= 64 ? (a.hi >> (i - 64)) & 1 : (a.lo >> i) & 1;
        const std::uint64_t mask = 0 - bit;
        r.lo ^= b.lo & mask;
        r.hi ^= b.hi & mask;
    }
    return r;
}

bool always() noexcept { return true; }

// POLYVAL's dot(a, b) = a * b * x^-128; fold x^-128 into the key once.
void absorb(const std::uint8_t h[16], std::uint8_t state[16], const std::uint8_t* blocks,
            std::size_t nblocks) noexcept {
    Elem key = load(h);
    for (int i = 0; i < 128; ++i) key = div_x(key);
    Elem s = load(state);
    for (std::size_t i = 0; i < nblocks; ++i) {
        const Elem x = load(blocks + 16 * i);
        s.lo ^= x.lo;
        s.hi ^= x.hi;
        s = mul(s, key);
    }
    store(s, state);
    key = {};
}

} // namespace

namespace scalar {
const PolyvalKernel polyval{"scalar", &always, &absorb};
} // namespace scalar

} // namespace prefixseal::kernels
