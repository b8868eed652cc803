#include "prefixseal/crypto/blake2b.hpp"

#include <algorithm>
#include <cstring>

#include "prefixseal/error.hpp"

namespace prefixseal::crypto {

namespace {

constexpr std::array<std::uint64_t, 8> kIv = {
    0x6a09e667f3bcc908ULL, 0xbb67ae8584caa73bULL, 0x3c6ef372fe94f82bULL, 0xa54ff53a5f1d36f1ULL,
    0x510e527fade682d1ULL, 0x9b05688c2b3e6c1fULL, 0x1f83d9abfb41bd6bULL, 0x5be0cd19137e2179ULL,
};

constexpr std::uint8_t kSigma[12][16] = {
    {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15},
    {14, 10, 4, 8, 9, 15, 13, 6, 1, 12, 0, 2, 11, 7, 5, 3},
    {11, 8, 12, 0, 5, 2, 15, 13, 10, 14, 3, 6, 7, 1, 9, 4},
    {7, 9, 3, 1, 13, 12, 11, 14, 2, 6, 5, 10, 4, 0, 15, 8},
    {9, 0, 5, 7, 2, 4, 10, 15, 14, 1, 11, 12, 6, 8, 3, 13},
    {2, 12, 6, 10, 0, 11, 8, 3, 4, 13, 7, 5, 15, 14, 1, 9},
    {12, 5, 1, 15, 14, 13, 4, 10, 0, 7, 6, 3, 9, 2, 8, 11},
    {13, 11, 7, 14, 12, 1, 3, 9, 5, 0, 15, 4, 8, 6, 2, 10},
    {6, 15, 14, 9, 11, 3, 0, 8, 12, 2, 13, 7, 1, 4, 10, 5},
    {10, 2, 8, 4, 7, 6, 1, 5, 15, 11, 9, 14, 3, 12, 13, 0},
    {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15},
    {14, 10, 4, 8, 9, 15, 13, 6, 1, 12, 0, 2, 11, 7, 5, 3},
};

constexpr std::uint64_t rotr(std::uint64_t x, int n) noexcept { return (x >> n) | (x << (64 - n)); }

std::uint64_t load64(const std::uint8_t* p) noexcept {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
    return v;
}

} // namespace

Blake2b::Blake2b(std::size_t digest_length) : digest_length_(digest_length) {
    if (digest_length == 0 || digest_length > kMaxDigest)
        throw Error(ErrorCode::InvalidParams, "BLAKE2b digest length must be 1..64");
    h_ = kIv;
    h_[0] ^= 0x01010000ULL ^ digest_length;
}

Blake2b::~Blake2b() {
    secure_wipe(h_.data(), sizeof h_);
    secure_wipe(buf_.data(), buf_.size());
}

void Blake2b::compress(const std::uint8_t* block, bool last) noexcept {
    std::uint64_t m[16];
    std::uint64_t v[16];
    for (int i = 0; i < 16; ++i) m[i] = load64(block + 8 * i);
    for (int i = 0; i < 8; ++i) {
        v[i] = h_[i];
        v[i + 8] = kIv[i];
    }
    v[12] ^= counter_lo_;
    v[13] ^= counter_hi_;
    if (last) v[14] = ~v[14];

    auto g = [&](int a, int b, int c, int d, std::uint64_t x, std::uint64_t y) {
        v[a] = v[a] + v[b] + x;
        v[d] = rotr(v[d] ^ v[a], 32);
        v[c] = v[c] + v[d];
        v[b] = rotr(v[b] ^ v[c], 24);
        v[a] = v[a] + v[b] + y;
        v[d] = rotr(v[d] ^ v[a], 16);
        v[c] = v[c] + v[d];
        v[b] = rotr(v[b] ^ v[c], 63);
    };
    for (const auto& s : kSigma) {
        g(0, 4, 8, 12, m[s[0]], m[s[1]]);
        g(1, 5, 9, 13, m[s[2]], m[s[3]]);
        g(2, 6, 10, 14, m[s[4]], m[s[5]]);
        g(3, 7, 11, 15, m[s[6]], m[s[7]]);
        g(0, 5, 10, 15, m[s[8]], m[s[9]]);
        g(1, 6, 11, 12, m[s[10]], m[s[11]]);
        g(2, 7, 8, 13, m[s[12]], m[s[13]]);
        g(3, 4, 9, 14, m[s[14]], m[s[15]]);
    }
    for (int i = 0; i < 8; ++i) h_[i] ^= v[i] ^ v[i + 8];
    secure_wipe(m, sizeof m);
    secure_wipe(v, sizeof v);
}

Blake2b& Blake2b::update(ByteView data) {
    std::size_t off = 0;
    while (off < data.size()) {
        // The final block must stay buffered until finalize marks it last.
        if (buffered_ == buf_.size()) {
            counter_lo_ += buf_.size();
            if (counter_lo_ < buf_.size()) ++counter_hi_;
            compress(buf_.data(), false);
            buffered_ = 0;
        }
        const std::size_t take = std::min(buf_.size() - buffered_, data.size() - off);
        std::memcpy(buf_.data() + buffered_, data.data() + off, take);
        buffered_ += take;
        off += take;
    }
    return *this;
}

void Blake2b::finalize(std::span<std::uint8_t> out) {
    if (out.size() != digest_length_) throw Error(ErrorCode::InvalidParams, "BLAKE2b output size mismatch");
    counter_lo_ += buffered_;
    if (counter_lo_ < buffered_) ++counter_hi_;
    std::memset(buf_.data() + buffered_, 0, buf_.size() - buffered_);
    compress(buf_.data(), true);
    for (std::size_t i = 0; i < digest_length_; ++i) out[i] = static_cast<std::uint8_t>(h_[i / 8] >> (8 * (i % 8)));
}

Bytes blake2b(ByteView data, std::size_t digest_length) {
    Blake2b h(digest_length);
    h.update(data);
    Bytes out(digest_length);
    h.finalize(out);
    return out;
}

} // namespace prefixseal::crypto
