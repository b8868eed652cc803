#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <thread>

#include "prefixseal/error.hpp"
#include "prefixseal/field_cipher.hpp"
#include "prefixseal/store/record_store.hpp"
#include "test_support.hpp"

namespace prefixseal::store {
namespace {

namespace fs = std::filesystem;

StoreSchema people_schema() {
    return StoreSchema::from_json(nlohmann::json::parse(R"({"fields":{
        "lastname":{"encrypted":true,"pref_len":3},
        "firstname":{"encrypted":true,"pref_len":2,"token_width":16},
        "city":{"encrypted":false}}})"));
}

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::ServerError; // sentinel: no error
}

class RecordStoreTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("prefixseal_store_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        SecretKey master;
        master.data()[0] = 42;
        ring_ = derive_subkeys(master);
        last_ = std::make_unique<EncryptionContext>(ring_, FieldId("lastname"), 3);
        first_ = std::make_unique<EncryptionContext>(ring_, FieldId("firstname"), 2, 16);
    }
    void TearDown() override { fs::remove_all(dir_); }

    StoredRecord person(const std::string& id, const std::string& last, const std::string& first,
                        const std::string& city) {
        return {id, {{"lastname", encrypt_text(*last_, last)}, {"firstname", encrypt_text(*first_, first)},
                     {"city", city}}};
    }

    fs::path dir_;
    KeyRing ring_;
    std::unique_ptr<EncryptionContext> last_;
    std::unique_ptr<EncryptionContext> first_;
};

TEST(StoreSchemaTest, PrefLenPresentIffEncrypted) {
    const auto s = people_schema();
    ASSERT_NE(s.find("firstname"), nullptr);
    EXPECT_EQ(s.find("firstname")->token_width, 16u);
    EXPECT_EQ(s.find("lastname")->token_width, kDefaultTokenWidth);
    EXPECT_FALSE(s.find("city")->encrypted);
    EXPECT_EQ(s.find("nope"), nullptr);
    for (const char* bad : {R"({"fields":{"a":{"encrypted":true}}})", R"({"fields":{"a":{"encrypted":false,"pref_len":2}}})",
                            R"({"fields":{"a":{"encrypted":true,"pref_len":300}}})", R"({"fields":{"a-b":{"encrypted":false}}})",
                            R"({"fields":{"a":{"encrypted":true,"pref_len":2,"token_width":0}}})", R"({"records":{}})"})
        EXPECT_EQ(code_of([&] { StoreSchema::from_json(nlohmann::json::parse(bad)); }), ErrorCode::SchemaViolation)
            << bad;
    EXPECT_EQ(StoreSchema::from_json(s.to_json()).fields().size(), 3u);
}

TEST_F(RecordStoreTest, IngestAndPrefixQuery) {
    RecordStore store(people_schema(), dir_);
    EXPECT_EQ(store.ingest({person("1", "Rossi", "Mario", "Roma"), person("2", "Rossini", "Anna", "Milano"),
                            person("3", "Russo", "Marco", "Napoli")}),
              3u);
    const auto hits = store.query("lastname", make_query_token(*last_, "Ros"));
    ASSERT_EQ(hits.size(), 2u);
    EXPECT_EQ(hits[0].id, "1");
    EXPECT_EQ(hits[1].id, "2");
    EXPECT_EQ(hits[0].fields.at("city"), "Roma");
    EXPECT_EQ(store.query("firstname", make_query_token(*first_, "Ma")).size(), 2u);
    EXPECT_EQ(store.query("lastname", make_query_token(*last_, "Z")).size(), 0u);
    EXPECT_EQ(code_of([&] { store.query("city", "v1.00."); }), ErrorCode::NotEncryptedField);
    EXPECT_EQ(code_of([&] { store.query("zip", "v1.00."); }), ErrorCode::UnknownField);
}

TEST_F(RecordStoreTest, BatchIsAllOrNothing) {
    RecordStore store(people_schema(), dir_);
    auto good = person("1", "Rossi", "Mario", "Roma");
    auto plaintext = person("2", "Verdi", "Luca", "Roma");
    plaintext.fields["lastname"] = "Verdi";
    EXPECT_EQ(code_of([&] { store.ingest({good, plaintext}); }), ErrorCode::SchemaViolation);
    EXPECT_EQ(store.size(), 0u);

    auto broken = person("3", "Verdi", "Luca", "Roma");
    broken.fields["lastname"] = "v2.03.AAAA.AAAAAAAAAAAAAAAAAAAAAAAAAAAAAAAAAAAAAA";
    EXPECT_EQ(code_of([&] { store.ingest({good, broken}); }), ErrorCode::MalformedCiphertext);

    auto wrong_len = person("4", "Verdi", "Luca", "Roma");
    wrong_len.fields["lastname"] = encrypt_text(EncryptionContext(ring_, FieldId("lastname"), 4), "Verdi");
    EXPECT_EQ(code_of([&] { store.ingest({good, wrong_len}); }), ErrorCode::SchemaViolation);

    auto extra = person("5", "Verdi", "Luca", "Roma");
    extra.fields["zip"] = "00100";
    EXPECT_EQ(code_of([&] { store.ingest({good, extra}); }), ErrorCode::SchemaViolation);

    EXPECT_EQ(store.size(), 0u);
    EXPECT_EQ(store.query("lastname", make_query_token(*last_, "R")).size(), 0u);
}

TEST_F(RecordStoreTest, SurvivesRestartAndLastWriteWins) {
    {
        RecordStore store(people_schema(), dir_);
        store.ingest({person("1", "Rossi", "Mario", "Roma"), person("2", "Bianchi", "Anna", "Milano")});
        store.ingest({person("1", "Ferrari", "Mario", "Torino")});
        store.put_salt("alice", std::string(32, 'a'));
        EXPECT_EQ(store.size(), 2u);
    }
    {
        std::ofstream torn(dir_ / "records.jsonl", std::ios::app);
        torn << R"({"id":"9","fields":{"ci)";
    }
    RecordStore store(people_schema(), dir_);
    EXPECT_EQ(store.size(), 2u);
    EXPECT_EQ(store.query("lastname", make_query_token(*last_, "Ros")).size(), 0u);
    const auto hits = store.query("lastname", make_query_token(*last_, "Fer"));
    ASSERT_EQ(hits.size(), 1u);
    EXPECT_EQ(hits[0].fields.at("city"), "Torino");
    EXPECT_EQ(store.get_salt("alice"), std::string(32, 'a'));

    // The torn tail is gone, so a later append and reopen still work.
    store.ingest({person("7", "Greco", "Lia", "Bari")});
    RecordStore reopened(people_schema(), dir_);
    EXPECT_EQ(reopened.size(), 3u);
}

TEST_F(RecordStoreTest, UserMaterial) {
    RecordStore store(people_schema(), dir_);
    EXPECT_EQ(code_of([&] { store.get_salt("bob"); }), ErrorCode::UnknownUser);
    EXPECT_EQ(code_of([&] { store.get_checkwords("bob"); }), ErrorCode::UnknownUser);
    EXPECT_EQ(code_of([&] { store.put_salt("bob", "xyz"); }), ErrorCode::InvalidSalt);
    EXPECT_EQ(code_of([&] { store.put_salt("bad/name", std::string(32, '0')); }), ErrorCode::UnknownUser);

    const auto words = make_check_words(ring_);
    store.put_checkwords("bob", words);
    EXPECT_EQ(store.get_checkwords("bob"), words);
    CheckWordSet two = words;
    two.words.pop_back();
    EXPECT_EQ(code_of([&] { store.put_checkwords("bob", two); }), ErrorCode::InvalidCheckWords);
    CheckWordSet prefixed = words;
    prefixed.words[0] = encrypt_text(*last_, "check-alpha");
    EXPECT_EQ(code_of([&] { store.put_checkwords("bob", prefixed); }), ErrorCode::InvalidCheckWords);

    const auto replaced = make_check_words(ring_);
    store.put_checkwords("bob", replaced);
    EXPECT_EQ(store.get_checkwords("bob"), replaced);
}

TEST_F(RecordStoreTest, ConcurrentReadersSeeWholeBatches) {
    RecordStore store(people_schema(), dir_);
    const std::string token = make_query_token(*last_, "Ros");
    std::vector<std::vector<StoredRecord>> batches;
    for (int b = 0; b < 20; ++b) {
        std::vector<StoredRecord> batch;
        for (int i = 0; i < 10; ++i)
            batch.push_back(person(std::to_string(b * 10 + i), "Rossi", "Mario", "Roma"));
        batches.push_back(std::move(batch));
    }
    std::atomic<bool> torn{false};
    std::atomic<bool> done{false};
    std::jthread reader([&] {
        while (!done) {
            if (store.query("lastname", token).size() % 10 != 0) torn = true;
        }
    });
    for (auto& batch : batches) store.ingest(std::move(batch));
    done = true;
    reader.join();
    EXPECT_FALSE(torn);
    EXPECT_EQ(store.query("lastname", token).size(), 200u);
}

} // namespace
} // namespace prefixseal::store
