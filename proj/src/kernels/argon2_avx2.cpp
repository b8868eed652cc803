// Built with -mavx2 on x86-64. One 16-word BLAKE2b state is held in four
// 256-bit rows; the diagonal step rotates rows 1..3 across lanes.

#include "prefixseal/kernels/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

namespace prefixseal::kernels {

namespace {

bool has_avx2() noexcept {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2");
}

template <int N>
inline __m256i rotr(__m256i x) noexcept {
    if constexpr (N == 32) {
        return _mm256_shuffle_epi32(x, _MM_SHUFFLE(2, 3, 0, 1));
    } else {
        return _mm256_or_si256(_mm256_srli_epi64(x, N), _mm256_slli_epi64(x, 64 - N));
    }
}

inline __m256i blamka(__m256i x, __m256i y) noexcept {
    const __m256i prod = _mm256_mul_epu32(x, y);
    return _mm256_add_epi64(_mm256_add_epi64(x, y), _mm256_add_epi64(prod, prod));
}

inline void g(__m256i& a, __m256i& b, __m256i& c, __m256i& d) noexcept {
    a = blamka(a, b);
    d = rotr<32>(_mm256_xor_si256(d, a));
    c = blamka(c, d);
    b = rotr<24>(_mm256_xor_si256(b, c));
    a = blamka(a, b);
    d = rotr<16>(_mm256_xor_si256(d, a));
    c = blamka(c, d);
    b = rotr<63>(_mm256_xor_si256(b, c));
}

inline void round(__m256i& a, __m256i& b, __m256i& c, __m256i& d) noexcept {
    g(a, b, c, d);
    b = _mm256_permute4x64_epi64(b, _MM_SHUFFLE(0, 3, 2, 1));
    c = _mm256_permute4x64_epi64(c, _MM_SHUFFLE(1, 0, 3, 2));
    d = _mm256_permute4x64_epi64(d, _MM_SHUFFLE(2, 1, 0, 3));
    g(a, b, c, d);
    b = _mm256_permute4x64_epi64(b, _MM_SHUFFLE(2, 1, 0, 3));
    c = _mm256_permute4x64_epi64(c, _MM_SHUFFLE(1, 0, 3, 2));
    d = _mm256_permute4x64_epi64(d, _MM_SHUFFLE(0, 3, 2, 1));
}

inline __m256i load_pair(const std::uint64_t* lo, const std::uint64_t* hi) noexcept {
    const __m128i l = _mm_loadu_si128(reinterpret_cast<const __m128i*>(lo));
    const __m128i h = _mm_loadu_si128(reinterpret_cast<const __m128i*>(hi));
    return _mm256_inserti128_si256(_mm256_castsi128_si256(l), h, 1);
}

inline void store_pair(std::uint64_t* lo, std::uint64_t* hi, __m256i x) noexcept {
    _mm_storeu_si128(reinterpret_cast<__m128i*>(lo), _mm256_castsi256_si128(x));
    _mm_storeu_si128(reinterpret_cast<__m128i*>(hi), _mm256_extracti128_si256(x, 1));
}

void fill_block(const Argon2Block& prev, const Argon2Block& ref, Argon2Block& next, bool with_xor) noexcept {
    Argon2Block r;
    Argon2Block tmp;
    for (std::size_t i = 0; i < kArgon2BlockWords; i += 4) {
        const __m256i p = _mm256_load_si256(reinterpret_cast<const __m256i*>(prev.v.data() + i));
        const __m256i q = _mm256_load_si256(reinterpret_cast<const __m256i*>(ref.v.data() + i));
        const __m256i x = _mm256_xor_si256(p, q);
        _mm256_store_si256(reinterpret_cast<__m256i*>(r.v.data() + i), x);
        __m256i t = x;
        if (with_xor)
            t = _mm256_xor_si256(t, _mm256_load_si256(reinterpret_cast<const __m256i*>(next.v.data() + i)));
        _mm256_store_si256(reinterpret_cast<__m256i*>(tmp.v.data() + i), t);
    }
    std::uint64_t* w = r.v.data();
    for (int row = 0; row < 8; ++row) {
        auto* base = reinterpret_cast<__m256i*>(w + 16 * row);
        __m256i a = _mm256_load_si256(base), b = _mm256_load_si256(base + 1);
        __m256i c = _mm256_load_si256(base + 2), d = _mm256_load_si256(base + 3);
        round(a, b, c, d);
        _mm256_store_si256(base, a);
        _mm256_store_si256(base + 1, b);
        _mm256_store_si256(base + 2, c);
        _mm256_store_si256(base + 3, d);
    }
    // Column i gathers the word pairs at 2i + 16j for j = 0..7.
    for (int col = 0; col < 8; ++col) {
        std::uint64_t* p = w + 2 * col;
        __m256i a = load_pair(p, p + 16), b = load_pair(p + 32, p + 48);
        __m256i c = load_pair(p + 64, p + 80), d = load_pair(p + 96, p + 112);
        round(a, b, c, d);
        store_pair(p, p + 16, a);
        store_pair(p + 32, p + 48, b);
        store_pair(p + 64, p + 80, c);
        store_pair(p + 96, p + 112, d);
    }
    for (std::size_t i = 0; i < kArgon2BlockWords; i += 4) {
        const __m256i t = _mm256_load_si256(reinterpret_cast<const __m256i*>(tmp.v.data() + i));
        const __m256i x = _mm256_load_si256(reinterpret_cast<const __m256i*>(r.v.data() + i));
        _mm256_store_si256(reinterpret_cast<__m256i*>(next.v.data() + i), _mm256_xor_si256(t, x));
    }
}

} // namespace

namespace x86 {
const Argon2Kernel avx2{"avx2", &has_avx2, &fill_block};
} // namespace x86

} // namespace prefixseal::kernels

#endif
