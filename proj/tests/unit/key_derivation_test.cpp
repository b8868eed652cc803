#include <gtest/gtest.h>
#include <sodium.h>

#include <random>
#include <set>

#include "prefixseal/error.hpp"
#include "prefixseal/field_codec.hpp"
#include "prefixseal/key_derivation.hpp"
#include "test_support.hpp"

namespace prefixseal {
namespace {

using testing::fast_params;

Bytes to_bytes(const SecretKey& k) { return Bytes(k.view().begin(), k.view().end()); }

// HKDF-SHA-256 with an empty salt written against libsodium's HMAC, so it
// shares nothing with the OpenSSL path under test.
Bytes sodium_hkdf(ByteView ikm, std::string_view info) {
    std::uint8_t zero_salt[32] = {};
    std::uint8_t prk[32];
    crypto_auth_hmacsha256_state st;
    crypto_auth_hmacsha256_init(&st, zero_salt, sizeof zero_salt);
    crypto_auth_hmacsha256_update(&st, ikm.data(), ikm.size());
    crypto_auth_hmacsha256_final(&st, prk);
    Bytes okm(32);
    crypto_auth_hmacsha256_init(&st, prk, sizeof prk);
    crypto_auth_hmacsha256_update(&st, reinterpret_cast<const std::uint8_t*>(info.data()), info.size());
    const std::uint8_t counter = 1;
    crypto_auth_hmacsha256_update(&st, &counter, 1);
    crypto_auth_hmacsha256_final(&st, okm.data());
    return okm;
}

class KeyDerivationTest : public ::testing::Test {
protected:
    static void SetUpTestSuite() { ASSERT_GE(sodium_init(), 0); }
};

TEST_F(KeyDerivationTest, DefaultProfileMatchesLibsodiumArgon2id) {
    KdfParams p;
    p.salt = {0x10, 0x32, 0x54, 0x76, 0x98, 0xba, 0xdc, 0xfe, 0, 1, 2, 3, 4, 5, 6, 7};
    const std::string pw = "correct horse battery staple";
    std::uint8_t expected[32];
    ASSERT_EQ(crypto_pwhash(expected, sizeof expected, pw.data(), pw.size(), p.salt.data(), 3,
                            std::size_t{65536} * 1024, crypto_pwhash_ALG_ARGON2ID13),
              0);
    EXPECT_EQ(to_bytes(derive_master_key(pw, p)), Bytes(expected, expected + 32));
}

TEST_F(KeyDerivationTest, PepperIsAppendedToPassword) {
    const auto p = fast_params();
    EXPECT_EQ(to_bytes(derive_master_key("secret", p, "pepper")), to_bytes(derive_master_key("secretpepper", p)));
    EXPECT_NE(to_bytes(derive_master_key("secret", p, "pepper")), to_bytes(derive_master_key("secret", p)));
}

TEST_F(KeyDerivationTest, SubkeysAreHkdfOfMasterWithDistinctLabels) {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 100; ++i) {
        SecretKey master;
        for (auto& b : master.span()) b = static_cast<std::uint8_t>(rng());
        const KeyRing ring = derive_subkeys(master);
        EXPECT_EQ(to_bytes(ring.master), to_bytes(master));
        EXPECT_EQ(to_bytes(ring.prefix), sodium_hkdf(master.view(), kPrefixLabel));
        EXPECT_EQ(to_bytes(ring.body), sodium_hkdf(master.view(), kBodyLabel));
        EXPECT_EQ(to_bytes(ring.check), sodium_hkdf(master.view(), kCheckLabel));
        const std::set<Bytes> distinct{to_bytes(ring.master), to_bytes(ring.prefix), to_bytes(ring.body),
                                       to_bytes(ring.check)};
        EXPECT_EQ(distinct.size(), 4u);
    }
}

TEST_F(KeyDerivationTest, DeterministicPerPasswordAndSalt) {
    const auto a = derive_keyring("pw", fast_params(1));
    const auto b = derive_keyring("pw", fast_params(1));
    const auto c = derive_keyring("pw", fast_params(2));
    const auto d = derive_keyring("pw2", fast_params(1));
    EXPECT_EQ(to_bytes(a.body), to_bytes(b.body));
    EXPECT_NE(to_bytes(a.body), to_bytes(c.body));
    EXPECT_NE(to_bytes(a.body), to_bytes(d.body));
}

TEST_F(KeyDerivationTest, RejectsEmptyPasswordAndBadCosts) {
    try {
        derive_master_key("", fast_params());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::EmptyPassword);
    }
    auto bad = fast_params();
    bad.time_cost = 0;
    EXPECT_THROW(bad.validate(), Error);
    bad = fast_params();
    bad.parallelism = 4;
    bad.memory_cost_kib = 16;
    try {
        derive_master_key("pw", bad);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InvalidParams);
    }
}

TEST_F(KeyDerivationTest, SaltHexRoundTrip) {
    const Salt s = generate_salt();
    EXPECT_NE(s, generate_salt());
    const std::string hex = salt_to_hex(s);
    EXPECT_EQ(hex.size(), 32u);
    EXPECT_EQ(salt_from_hex(hex), s);
    EXPECT_FALSE(salt_from_hex(hex.substr(2)).has_value());
    EXPECT_FALSE(salt_from_hex(std::string(32, 'g')).has_value());
}

TEST_F(KeyDerivationTest, CheckWordsAcceptOwnerAndRejectOthers) {
    const auto p = fast_params();
    const auto ring = derive_keyring("owner password", p);
    const auto words = make_check_words(ring);
    ASSERT_EQ(words.words.size(), 3u);
    for (const auto& w : words.words) EXPECT_TRUE(w.starts_with("v1.00.."));
    EXPECT_NE(words, make_check_words(ring)) << "check-words carry fresh nonces";
    EXPECT_TRUE(verify_password(ring, words));

    std::mt19937_64 rng(99);
    for (int i = 0; i < 100; ++i) {
        std::string guess = "owner password";
        guess[rng() % guess.size()] = static_cast<char>('!' + rng() % 90);
        if (guess == "owner password") guess += "x";
        EXPECT_FALSE(verify_password(derive_keyring(guess, p), words)) << guess;
    }
}

TEST_F(KeyDerivationTest, CheckWordsStructuralFailures) {
    const auto ring = derive_keyring("pw", fast_params());
    auto words = make_check_words(ring);

    auto two = words;
    two.words.pop_back();
    EXPECT_FALSE(verify_password(ring, two));

    auto swapped = words;
    std::swap(swapped.words[0], swapped.words[1]);
    EXPECT_FALSE(verify_password(ring, swapped));

    auto broken = words;
    broken.words[2] = "not a ciphertext";
    try {
        verify_password(ring, broken);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::MalformedCiphertext);
    }
}

} // namespace
} // namespace prefixseal
