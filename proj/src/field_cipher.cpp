#include "prefixseal/field_cipher.hpp"

#include "prefixseal/error.hpp"

namespace prefixseal {

namespace {

std::size_t checked_width(std::size_t w) {
    if (w == 0 || w > kMaxTokenWidth) throw Error(ErrorCode::InvalidContext, "token width must be 1..16 bytes");
    return w;
}

unsigned checked_pref_len(unsigned n) {
    if (n > kMaxPrefixLength) throw Error(ErrorCode::InvalidContext, "prefix length must be 0..255");
    return n;
}

constexpr std::uint8_t kUnitSeparator = 0x1F;
constexpr std::array<std::uint8_t, kBodyNonceSize> kZeroNonce{};

} // namespace

EncryptionContext::EncryptionContext(const KeyRing& ring, FieldId field, unsigned pref_len, std::size_t token_width)
    : field_(std::move(field)),
      pref_len_(checked_pref_len(pref_len)),
      token_width_(checked_width(token_width)),
      prefix_(ring.prefix.view()),
      body_(ring.body.view()) {}

std::vector<PrefixToken> make_prefix_tags(const EncryptionContext& ctx, std::u32string_view chars) {
    std::vector<PrefixToken> tags;
    tags.reserve(chars.size());
    const ByteView field = as_bytes(ctx.field().str());
    Bytes aad(field.begin(), field.end());
    aad.push_back(kUnitSeparator);
    const std::size_t position_at = aad.size();
    aad.insert(aad.end(), {0, 0, 0, 0, kUnitSeparator});
    for (std::size_t i = 0; i < chars.size(); ++i) {
        const auto pos = static_cast<std::uint32_t>(i);
        aad[position_at] = static_cast<std::uint8_t>(pos >> 24);
        aad[position_at + 1] = static_cast<std::uint8_t>(pos >> 16);
        aad[position_at + 2] = static_cast<std::uint8_t>(pos >> 8);
        aad[position_at + 3] = static_cast<std::uint8_t>(pos);
        const std::string current = encode_utf8(chars[i]);
        const Bytes sealed = ctx.prefix_cipher().seal(kZeroNonce, as_bytes(current), aad);
        tags.emplace_back(ByteView(sealed.data(), ctx.token_width()));
        // The preceding characters grow by one for the next position.
        aad.insert(aad.end(), current.begin(), current.end());
    }
    return tags;
}

namespace detail {

std::string seal_body(const crypto::AesGcmSiv& cipher, std::string_view head, std::string_view plaintext) {
    Bytes body(kBodyNonceSize);
    random_bytes(body);
    const Bytes sealed = cipher.seal(ByteView(body.data(), kBodyNonceSize), as_bytes(plaintext), as_bytes(head));
    body.insert(body.end(), sealed.begin(), sealed.end());
    return base64url_encode(body);
}

std::string open_body(const crypto::AesGcmSiv& cipher, std::string_view head, ByteView body) {
    auto plain = cipher.open(body.first(kBodyNonceSize), body.subspan(kBodyNonceSize), as_bytes(head));
    if (!plain) throw Error(ErrorCode::AuthenticationFailed, "");
    std::string out(as_chars(*plain));
    secure_wipe(plain->data(), plain->size());
    return out;
}

} // namespace detail

std::string encrypt_text(const EncryptionContext& ctx, std::string_view text) {
    const std::string normalized = normalize(text);
    const Partition part = partition(normalized, ctx.pref_len());
    std::string head = wire_header(ctx.pref_len());
    head += encode_tags(make_prefix_tags(ctx, part.prefix));
    head.push_back('.');
    return head + detail::seal_body(ctx.body_cipher(), head, normalized);
}

std::string decrypt_text(const EncryptionContext& ctx, std::string_view serialized) {
    const FieldCiphertext ct = parse(serialized, ctx.token_width());
    return detail::open_body(ctx.body_cipher(), authenticated_head(serialized), ct.body);
}

std::string make_query_token(const EncryptionContext& ctx, std::string_view term) {
    if (term.empty()) throw Error(ErrorCode::EmptyTerm, "");
    const std::string normalized = normalize(term);
    const Partition part = partition(normalized, ctx.pref_len());
    return wire_header(ctx.pref_len()) + encode_tags(make_prefix_tags(ctx, part.prefix));
}

} // namespace prefixseal
