#pragma once

#include "prefixseal/bytes.hpp"

namespace prefixseal::crypto {

// HKDF-SHA-256 (RFC 5869) extract-and-expand; an empty salt means HashLen zeros.
void hkdf_sha256(ByteView ikm, ByteView salt, ByteView info, std::span<std::uint8_t> out);

} // namespace prefixseal::crypto
