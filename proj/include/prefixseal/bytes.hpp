#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace prefixseal {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

inline ByteView as_bytes(std::string_view s) noexcept {
    return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

inline std::string_view as_chars(ByteView b) noexcept {
    return {reinterpret_cast<const char*>(b.data()), b.size()};
}

// Overwrites memory in a way the optimizer may not elide.
void secure_wipe(void* data, std::size_t size) noexcept;

bool constant_time_equal(ByteView a, ByteView b) noexcept;

void random_bytes(std::span<std::uint8_t> out);

std::string hex_encode(ByteView data);
// Lowercase or uppercase hex; nullopt on odd length or non-hex characters.
std::optional<Bytes> hex_decode(std::string_view hex);

// Fixed-size secret buffer, wiped on destruction.
template <std::size_t N>
class SecretArray {
public:
    static constexpr std::size_t size_bytes = N;

    SecretArray() noexcept { bytes_.fill(0); }
    explicit SecretArray(ByteView src) noexcept {
        bytes_.fill(0);
        for (std::size_t i = 0; i < N && i < src.size(); ++i) bytes_[i] = src[i];
    }
    SecretArray(const SecretArray&) = default;
    SecretArray& operator=(const SecretArray&) = default;
    ~SecretArray() { secure_wipe(bytes_.data(), N); }

    std::uint8_t* data() noexcept { return bytes_.data(); }
    const std::uint8_t* data() const noexcept { return bytes_.data(); }
    constexpr std::size_t size() const noexcept { return N; }
    std::span<std::uint8_t, N> span() noexcept { return std::span<std::uint8_t, N>(bytes_); }
    ByteView view() const noexcept { return ByteView(bytes_.data(), N); }

    friend bool operator==(const SecretArray& a, const SecretArray& b) noexcept {
        return constant_time_equal(a.view(), b.view());
    }

private:
    std::array<std::uint8_t, N> bytes_;
};

using SecretKey = SecretArray<32>;

// Byte vector that is wiped when it goes out of scope.
class SecretBytes {
public:
    SecretBytes() = default;
    explicit SecretBytes(ByteView src) : bytes_(src.begin(), src.end()) {}
    SecretBytes(const SecretBytes&) = default;
    SecretBytes(SecretBytes&&) noexcept = default;
    SecretBytes& operator=(const SecretBytes&) = default;
    SecretBytes& operator=(SecretBytes&&) noexcept = default;
    ~SecretBytes() { secure_wipe(bytes_.data(), bytes_.size()); }

    void append(ByteView more) { bytes_.insert(bytes_.end(), more.begin(), more.end()); }
    ByteView view() const noexcept { return bytes_; }
    std::size_t size() const noexcept { return bytes_.size(); }
    bool empty() const noexcept { return bytes_.empty(); }

private:
    Bytes bytes_;
};

} // namespace prefixseal
