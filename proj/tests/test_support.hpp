#pragma once

#include <fstream>
#include <random>
#include <string>

#include <json.hpp>

#include "prefixseal/bytes.hpp"
#include "prefixseal/key_derivation.hpp"

namespace prefixseal::testing {

inline nlohmann::json load_json(const std::string& name) {
    std::ifstream in(std::string(PREFIXSEAL_TEST_DATA) + "/" + name);
    return nlohmann::json::parse(in);
}

inline Bytes unhex(const std::string& s) { return hex_decode(s).value(); }

// Cheap KDF profile for tests that exercise everything except Argon2 cost.
inline KdfParams fast_params(std::uint8_t salt_byte = 0x02) {
    KdfParams p;
    p.memory_cost_kib = 64;
    p.time_cost = 1;
    p.parallelism = 1;
    p.salt.fill(salt_byte);
    return p;
}

// Random scalar value drawn from several planes, surrogates excluded.
inline char32_t random_scalar(std::mt19937_64& rng) {
    switch (rng() % 6) {
    case 0:
    case 1: return static_cast<char32_t>(0x20 + rng() % 0x5f);
    case 2: return static_cast<char32_t>(0xA0 + rng() % 0x500);
    case 3: return static_cast<char32_t>(0x300 + rng() % 0x70); // combining marks
    case 4: {
        char32_t c;
        do c = static_cast<char32_t>(0x800 + rng() % 0xF800);
        while (c >= 0xD800 && c <= 0xDFFF);
        return c;
    }
    default: return static_cast<char32_t>(0x10000 + rng() % 0x100000);
    }
}

inline std::u32string random_u32(std::mt19937_64& rng, std::size_t max_len) {
    std::u32string s;
    const std::size_t n = rng() % (max_len + 1);
    for (std::size_t i = 0; i < n; ++i) s.push_back(random_scalar(rng));
    return s;
}

} // namespace prefixseal::testing
