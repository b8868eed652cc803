// Built with -mpclmul -msse4.1 on x86-64.

#include "prefixseal/kernels/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

namespace prefixseal::kernels {

namespace {

bool has_clmul() noexcept {
    __builtin_cpu_init();
    return __builtin_cpu_supports("pclmul") && __builtin_cpu_supports("sse4.1");
}

// a * b * x^-128: schoolbook carry-less product, then two Montgomery folding
// steps by the reduction constant 0xc2..01.
inline __m128i dot(__m128i a, __m128i b) noexcept {
    const __m128i poly = _mm_setr_epi32(0x1, 0x0, 0x0, static_cast<int>(0xc2000000));
    __m128i lo = _mm_clmulepi64_si128(a, b, 0x00);
    __m128i hi = _mm_clmulepi64_si128(a, b, 0x11);
    __m128i mid = _mm_xor_si128(_mm_clmulepi64_si128(a, b, 0x10), _mm_clmulepi64_si128(a, b, 0x01));
    lo = _mm_xor_si128(lo, _mm_slli_si128(mid, 8));
    hi = _mm_xor_si128(hi, _mm_srli_si128(mid, 8));
    __m128i t = _mm_clmulepi64_si128(lo, poly, 0x10);
    lo = _mm_xor_si128(_mm_shuffle_epi32(lo, 78), t);
    t = _mm_clmulepi64_si128(lo, poly, 0x10);
    lo = _mm_xor_si128(_mm_shuffle_epi32(lo, 78), t);
    return _mm_xor_si128(hi, lo);
}

void absorb(const std::uint8_t h[16], std::uint8_t state[16], const std::uint8_t* blocks,
            std::size_t nblocks) noexcept {
    const __m128i key = _mm_loadu_si128(reinterpret_cast<const __m128i*>(h));
    __m128i s = _mm_loadu_si128(reinterpret_cast<const __m128i*>(state));
    for (std::size_t i = 0; i < nblocks; ++i) {
        const __m128i x = _mm_loadu_si128(reinterpret_cast<const __m128i*>(blocks + 16 * i));
        s = dot(_mm_xor_si128(s, x), key);
    }
    _mm_storeu_si128(reinterpret_cast<__m128i*>(state), s);
}

} // namespace

namespace x86 {
const PolyvalKernel clmul{"pclmul", &has_clmul, &absorb};
} // namespace x86

} // namespace prefixseal::kernels

#endif
