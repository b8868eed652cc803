// Built with -maes -msse4.1 on x86-64; only entered when the CPU reports AES-NI.

#include "prefixseal/kernels/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cstring>

namespace prefixseal::kernels {

namespace {

bool has_aesni() noexcept {
    __builtin_cpu_init();
    return __builtin_cpu_supports("aes") && __builtin_cpu_supports("sse4.1");
}

struct Schedule {
    __m128i k[kAes256Rounds + 1];
    explicit Schedule(const AesRoundKeys& rk) noexcept {
        for (std::size_t i = 0; i <= kAes256Rounds; ++i)
            k[i] = _mm_loadu_si128(reinterpret_cast<const __m128i*>(rk.bytes.data() + 16 * i));
    }
    ~Schedule() {
        for (auto& x : k) x = _mm_setzero_si128();
    }
};

inline __m128i encrypt1(const Schedule& s, __m128i b) noexcept {
    b = _mm_xor_si128(b, s.k[0]);
    for (std::size_t r = 1; r < kAes256Rounds; ++r) b = _mm_aesenc_si128(b, s.k[r]);
    return _mm_aesenclast_si128(b, s.k[kAes256Rounds]);
}

inline void encrypt4(const Schedule& s, __m128i& b0, __m128i& b1, __m128i& b2, __m128i& b3) noexcept {
    b0 = _mm_xor_si128(b0, s.k[0]);
    b1 = _mm_xor_si128(b1, s.k[0]);
    b2 = _mm_xor_si128(b2, s.k[0]);
    b3 = _mm_xor_si128(b3, s.k[0]);
    for (std::size_t r = 1; r < kAes256Rounds; ++r) {
        b0 = _mm_aesenc_si128(b0, s.k[r]);
        b1 = _mm_aesenc_si128(b1, s.k[r]);
        b2 = _mm_aesenc_si128(b2, s.k[r]);
        b3 = _mm_aesenc_si128(b3, s.k[r]);
    }
    b0 = _mm_aesenclast_si128(b0, s.k[kAes256Rounds]);
    b1 = _mm_aesenclast_si128(b1, s.k[kAes256Rounds]);
    b2 = _mm_aesenclast_si128(b2, s.k[kAes256Rounds]);
    b3 = _mm_aesenclast_si128(b3, s.k[kAes256Rounds]);
}

void encrypt_blocks(const AesRoundKeys& rk, const std::uint8_t* in, std::uint8_t* out,
                    std::size_t nblocks) noexcept {
    const Schedule s(rk);
    std::size_t i = 0;
    for (; i + 4 <= nblocks; i += 4) {
        auto* src = reinterpret_cast<const __m128i*>(in + 16 * i);
        __m128i b0 = _mm_loadu_si128(src), b1 = _mm_loadu_si128(src + 1);
        __m128i b2 = _mm_loadu_si128(src + 2), b3 = _mm_loadu_si128(src + 3);
        encrypt4(s, b0, b1, b2, b3);
        auto* dst = reinterpret_cast<__m128i*>(out + 16 * i);
        _mm_storeu_si128(dst, b0);
        _mm_storeu_si128(dst + 1, b1);
        _mm_storeu_si128(dst + 2, b2);
        _mm_storeu_si128(dst + 3, b3);
    }
    for (; i < nblocks; ++i) {
        const __m128i b = _mm_loadu_si128(reinterpret_cast<const __m128i*>(in + 16 * i));
        _mm_storeu_si128(reinterpret_cast<__m128i*>(out + 16 * i), encrypt1(s, b));
    }
}

void ctr32_le_xor(const AesRoundKeys& rk, const std::uint8_t counter[16], const std::uint8_t* in,
                  std::uint8_t* out, std::size_t len) noexcept {
    const Schedule s(rk);
    // Lane 0 of epi32 holds bytes 0..3 little-endian, so 32-bit adds wrap
    // exactly like the counter definition requires.
    const __m128i one = _mm_setr_epi32(1, 0, 0, 0);
    const __m128i two = _mm_setr_epi32(2, 0, 0, 0);
    const __m128i three = _mm_setr_epi32(3, 0, 0, 0);
    const __m128i four = _mm_setr_epi32(4, 0, 0, 0);
    __m128i ctr = _mm_loadu_si128(reinterpret_cast<const __m128i*>(counter));
    std::size_t off = 0;
    for (; off + 64 <= len; off += 64) {
        __m128i b0 = ctr, b1 = _mm_add_epi32(ctr, one);
        __m128i b2 = _mm_add_epi32(ctr, two), b3 = _mm_add_epi32(ctr, three);
        ctr = _mm_add_epi32(ctr, four);
        encrypt4(s, b0, b1, b2, b3);
        auto* src = reinterpret_cast<const __m128i*>(in + off);
        auto* dst = reinterpret_cast<__m128i*>(out + off);
        _mm_storeu_si128(dst, _mm_xor_si128(b0, _mm_loadu_si128(src)));
        _mm_storeu_si128(dst + 1, _mm_xor_si128(b1, _mm_loadu_si128(src + 1)));
        _mm_storeu_si128(dst + 2, _mm_xor_si128(b2, _mm_loadu_si128(src + 2)));
        _mm_storeu_si128(dst + 3, _mm_xor_si128(b3, _mm_loadu_si128(src + 3)));
    }
    for (; off < len; off += 16) {
        const __m128i ks = encrypt1(s, ctr);
        ctr = _mm_add_epi32(ctr, one);
        if (len - off >= 16) {
            const __m128i x = _mm_loadu_si128(reinterpret_cast<const __m128i*>(in + off));
            _mm_storeu_si128(reinterpret_cast<__m128i*>(out + off), _mm_xor_si128(x, ks));
        } else {
            alignas(16) std::uint8_t stream[16];
            _mm_store_si128(reinterpret_cast<__m128i*>(stream), ks);
            for (std::size_t j = 0; off + j < len; ++j) out[off + j] = in[off + j] ^ stream[j];
            std::memset(stream, 0, sizeof stream);
        }
    }
}

} // namespace

namespace x86 {
const AesKernel aesni{"aesni", &has_aesni, &encrypt_blocks, &ctr32_le_xor};
} // namespace x86

} // namespace prefixseal::kernels

#endif
