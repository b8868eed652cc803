#pragma once

#include <array>

#include "prefixseal/bytes.hpp"

namespace prefixseal::crypto {

// Unkeyed BLAKE2b (RFC 7693) with a configurable digest length of 1..64 bytes.
class Blake2b {
public:
    static constexpr std::size_t kMaxDigest = 64;

    explicit Blake2b(std::size_t digest_length);
    ~Blake2b();

    Blake2b& update(ByteView data);
    void finalize(std::span<std::uint8_t> out);

private:
    void compress(const std::uint8_t* block, bool last) noexcept;

    std::array<std::uint64_t, 8> h_{};
    std::array<std::uint8_t, 128> buf_{};
    std::size_t buffered_ = 0;
    std::uint64_t counter_lo_ = 0;
    std::uint64_t counter_hi_ = 0;
    std::size_t digest_length_;
};

Bytes blake2b(ByteView data, std::size_t digest_length);

} // namespace prefixseal::crypto
