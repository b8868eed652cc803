#include "prefixseal/field_codec.hpp"

#include <unicode/normalizer2.h>
#include <unicode/unistr.h>

#include <algorithm>

#include "prefixseal/error.hpp"

namespace prefixseal {

namespace {

constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-_";

constexpr std::array<std::int8_t, 256> make_reverse() noexcept {
    std::array<std::int8_t, 256> r{};
    for (auto& x : r) x = -1;
    for (int i = 0; i < 64; ++i) r[static_cast<unsigned char>(kAlphabet[i])] = static_cast<std::int8_t>(i);
    return r;
}

constexpr auto kReverse = make_reverse();

bool is_ascii(std::string_view s) noexcept {
    return std::all_of(s.begin(), s.end(), [](char c) { return static_cast<unsigned char>(c) < 0x80; });
}

// Decodes one scalar value at s[i]; returns its length, or 0 if ill-formed.
std::size_t decode_one(std::string_view s, std::size_t i, char32_t& out) noexcept {
    const auto b0 = static_cast<unsigned char>(s[i]);
    if (b0 < 0x80) {
        out = b0;
        return 1;
    }
    std::size_t len;
    char32_t cp;
    char32_t min;
    if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        cp = b0 & 0x1F;
        min = 0x80;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        cp = b0 & 0x0F;
        min = 0x800;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        cp = b0 & 0x07;
        min = 0x10000;
    } else {
        return 0;
    }
    if (i + len > s.size()) return 0;
    for (std::size_t k = 1; k < len; ++k) {
        const auto b = static_cast<unsigned char>(s[i + k]);
        if ((b & 0xC0) != 0x80) return 0;
        cp = (cp << 6) | (b & 0x3F);
    }
    if (cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return 0;
    out = cp;
    return len;
}

bool is_hex_lower(char c) noexcept { return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'); }

} // namespace

FieldId::FieldId(std::string id) : id_(std::move(id)) {
    if (!is_valid(id_)) throw Error(ErrorCode::InvalidContext, "field identifier must match [A-Za-z0-9_]{1,64}");
}

bool FieldId::is_valid(std::string_view id) noexcept {
    if (id.empty() || id.size() > 64) return false;
    return std::all_of(id.begin(), id.end(), [](char c) {
        return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
    });
}

PrefixToken::PrefixToken(ByteView bytes) : width_(bytes.size()) {
    if (bytes.empty() || bytes.size() > kMaxTokenWidth)
        throw Error(ErrorCode::InvalidContext, "token width must be 1..16 bytes");
    std::copy(bytes.begin(), bytes.end(), bytes_.begin());
}

bool is_valid_utf8(std::string_view s) noexcept {
    char32_t cp;
    for (std::size_t i = 0; i < s.size();) {
        const std::size_t n = decode_one(s, i, cp);
        if (n == 0) return false;
        i += n;
    }
    return true;
}

std::u32string decode_utf8(std::string_view s) {
    std::u32string out;
    out.reserve(s.size());
    char32_t cp;
    for (std::size_t i = 0; i < s.size();) {
        const std::size_t n = decode_one(s, i, cp);
        if (n == 0) throw Error(ErrorCode::InvalidText, "ill-formed UTF-8");
        out.push_back(cp);
        i += n;
    }
    return out;
}

std::string encode_utf8(char32_t c) {
    std::string out;
    if (c < 0x80) {
        out.push_back(static_cast<char>(c));
    } else if (c < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (c >> 6)));
        out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    } else if (c < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (c >> 12)));
        out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (c >> 18)));
        out.push_back(static_cast<char>(0x80 | ((c >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    }
    return out;
}

std::string encode_utf8(std::u32string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char32_t c : s) out += encode_utf8(c);
    return out;
}

std::string normalize(std::string_view raw) {
    if (!is_valid_utf8(raw)) throw Error(ErrorCode::InvalidText, "ill-formed UTF-8");
    if (is_ascii(raw)) return std::string(raw);
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
    if (U_FAILURE(status)) throw Error(ErrorCode::IoError, "ICU NFC data unavailable");
    const icu::UnicodeString src =
        icu::UnicodeString::fromUTF8(icu::StringPiece(raw.data(), static_cast<std::int32_t>(raw.size())));
    const icu::UnicodeString dst = nfc->normalize(src, status);
    if (U_FAILURE(status)) throw Error(ErrorCode::InvalidText, u_errorName(status));
    std::string out;
    dst.toUTF8String(out);
    return out;
}

Partition partition(std::string_view normalized, unsigned pref_len) {
    Partition p;
    char32_t cp;
    for (std::size_t i = 0; i < normalized.size() && p.prefix.size() < pref_len;) {
        const std::size_t n = decode_one(normalized, i, cp);
        if (n == 0) throw Error(ErrorCode::InvalidText, "ill-formed UTF-8");
        p.prefix.push_back(cp);
        i += n;
    }
    p.effective_k = p.prefix.size();
    return p;
}

std::string base64url_encode(ByteView data) {
    std::string out;
    out.reserve(base64url_length(data.size()));
    std::size_t i = 0;
    for (; i + 3 <= data.size(); i += 3) {
        const std::uint32_t v = (data[i] << 16) | (data[i + 1] << 8) | data[i + 2];
        out.push_back(kAlphabet[(v >> 18) & 63]);
        out.push_back(kAlphabet[(v >> 12) & 63]);
        out.push_back(kAlphabet[(v >> 6) & 63]);
        out.push_back(kAlphabet[v & 63]);
    }
    const std::size_t rest = data.size() - i;
    if (rest == 1) {
        const std::uint32_t v = data[i] << 16;
        out.push_back(kAlphabet[(v >> 18) & 63]);
        out.push_back(kAlphabet[(v >> 12) & 63]);
    } else if (rest == 2) {
        const std::uint32_t v = (data[i] << 16) | (data[i + 1] << 8);
        out.push_back(kAlphabet[(v >> 18) & 63]);
        out.push_back(kAlphabet[(v >> 12) & 63]);
        out.push_back(kAlphabet[(v >> 6) & 63]);
    }
    return out;
}

std::optional<Bytes> base64url_decode(std::string_view text) {
    if (text.size() % 4 == 1) return std::nullopt;
    Bytes out;
    out.reserve(text.size() * 3 / 4);
    std::uint32_t acc = 0;
    int bits = 0;
    for (char c : text) {
        const int v = kReverse[static_cast<unsigned char>(c)];
        if (v < 0) return std::nullopt;
        acc = (acc << 6) | static_cast<std::uint32_t>(v);
        bits += 6;
        if (bits >= 8) {
            bits -= 8;
            out.push_back(static_cast<std::uint8_t>(acc >> bits));
            acc &= (1u << bits) - 1;
        }
    }
    // Leftover bits must be zero so every byte string has exactly one encoding.
    if (acc != 0) return std::nullopt;
    return out;
}

std::string wire_header(unsigned pref_len) {
    static constexpr char digits[] = "0123456789abcdef";
    if (pref_len > kMaxPrefixLength) throw Error(ErrorCode::InvalidContext, "prefix length must be 0..255");
    std::string h(kWireVersion);
    h.push_back('.');
    h.push_back(digits[(pref_len >> 4) & 0xF]);
    h.push_back(digits[pref_len & 0xF]);
    h.push_back('.');
    return h;
}

std::string encode_tags(const std::vector<PrefixToken>& tags) {
    std::string out;
    for (const auto& t : tags) out += base64url_encode(t.bytes());
    return out;
}

std::string serialize(const FieldCiphertext& ct) {
    std::string out = wire_header(ct.declared_pref_len);
    out += encode_tags(ct.prefix_tags);
    out.push_back('.');
    out += base64url_encode(ct.body);
    return out;
}

FieldCiphertext parse(std::string_view text, std::size_t token_width) {
    if (token_width == 0 || token_width > kMaxTokenWidth)
        throw Error(ErrorCode::InvalidContext, "token width must be 1..16 bytes");
    std::array<std::string_view, 4> sections;
    std::size_t count = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= text.size(); ++i) {
        if (i == text.size() || text[i] == '.') {
            if (count == sections.size()) throw Error(MalformedReason::bad_section_count, "");
            sections[count++] = text.substr(start, i - start);
            start = i + 1;
        }
    }
    if (count != sections.size()) throw Error(MalformedReason::bad_section_count, "");
    if (sections[0] != kWireVersion) throw Error(MalformedReason::bad_version, "");
    const auto hex = sections[1];
    if (hex.size() != 2 || !is_hex_lower(hex[0]) || !is_hex_lower(hex[1]))
        throw Error(MalformedReason::bad_header, "");

    FieldCiphertext ct;
    ct.declared_pref_len = static_cast<unsigned>(std::stoul(std::string(hex), nullptr, 16));

    const std::size_t chars = base64url_length(token_width);
    const auto tags = sections[2];
    if (tags.size() % chars != 0) throw Error(MalformedReason::bad_tag_width, "");
    if (tags.size() / chars > ct.declared_pref_len)
        throw Error(MalformedReason::bad_tag_width, "more tags than the declared prefix length");
    for (std::size_t off = 0; off < tags.size(); off += chars) {
        auto raw = base64url_decode(tags.substr(off, chars));
        if (!raw || raw->size() != token_width) throw Error(MalformedReason::bad_encoding, "tag section");
        ct.prefix_tags.emplace_back(*raw);
    }

    auto body = base64url_decode(sections[3]);
    if (!body) throw Error(MalformedReason::bad_encoding, "body section");
    if (body->size() < kBodyNonceSize + kBodyTagSize) throw Error(MalformedReason::bad_encoding, "body too short");
    ct.body = std::move(*body);
    return ct;
}

std::string_view authenticated_head(std::string_view serialized) noexcept {
    const auto pos = serialized.rfind('.');
    return pos == std::string_view::npos ? serialized : serialized.substr(0, pos + 1);
}

} // namespace prefixseal
