#pragma once

// Reference "untrusting server": stores ciphertext next to clear fields and
// answers prefix-token queries by string matching. Per-user KDF salts and
// check-words live here too. It never holds keys.
//
// Persistence is two JSON-lines files in the data directory, replayed on
// open (last write wins):
//   records.jsonl  {"id":...,"fields":{...}}
//   users.jsonl    {"user":...,"salt":"<hex>"} | {"user":...,"words":[...]}

#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "prefixseal/key_derivation.hpp"
#include "prefixseal/store/schema.hpp"

namespace prefixseal::store {

struct StoredRecord {
    std::string id;
    std::map<std::string, std::string> fields;

    friend bool operator==(const StoredRecord&, const StoredRecord&) = default;
};

nlohmann::json to_json(const StoredRecord& record);
// Shape check only; throws SchemaViolation.
StoredRecord record_from_json(const nlohmann::json& doc);

// Users are path segments in the HTTP API: [A-Za-z0-9_.@-]{1,128}.
bool is_valid_user(std::string_view user) noexcept;

class RecordStore {
public:
    RecordStore(StoreSchema schema, std::filesystem::path data_dir);

    RecordStore(const RecordStore&) = delete;
    RecordStore& operator=(const RecordStore&) = delete;

    // Validates the whole batch first; either every record becomes visible or
    // none does. Returns the batch size.
    std::size_t ingest(std::vector<StoredRecord> batch);

    // Throws UnknownField / NotEncryptedField. Results keep ingestion order.
    std::vector<StoredRecord> query(std::string_view field_id, std::string_view token) const;

    void put_salt(const std::string& user, std::string_view salt_hex);
    std::string get_salt(const std::string& user) const;
    void put_checkwords(const std::string& user, const CheckWordSet& words);
    CheckWordSet get_checkwords(const std::string& user) const;

    std::size_t size() const;
    const StoreSchema& schema() const noexcept { return schema_; }
    std::filesystem::path records_path() const { return dir_ / "records.jsonl"; }
    std::filesystem::path users_path() const { return dir_ / "users.jsonl"; }

private:
    struct UserMaterial {
        std::string salt;
        std::vector<std::string> words;
    };

    void validate(const StoredRecord& record) const;
    void apply(StoredRecord record);
    void replay_records();
    void replay_users();
    void append_lines(std::ofstream& out, const std::string& lines);

    StoreSchema schema_;
    std::filesystem::path dir_;

    mutable std::shared_mutex mu_;
    std::mutex write_mu_;
    std::ofstream records_out_;
    std::ofstream users_out_;

    std::vector<StoredRecord> records_;
    std::unordered_map<std::string, std::size_t> by_id_;
    // Per encrypted field: serialized ciphertext -> record position.
    std::map<std::string, std::multimap<std::string, std::size_t, std::less<>>, std::less<>> index_;
    std::unordered_map<std::string, UserMaterial> users_;
};

} // namespace prefixseal::store
