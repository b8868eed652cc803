#include "prefixseal/store/record_store.hpp"

#include <algorithm>

#include "prefixseal/error.hpp"
#include "prefixseal/prefix_search.hpp"

namespace prefixseal::store {

namespace fs = std::filesystem;

nlohmann::json to_json(const StoredRecord& record) {
    nlohmann::json fields = nlohmann::json::object();
    for (const auto& [k, v] : record.fields) fields[k] = v;
    return {{"id", record.id}, {"fields", fields}};
}

StoredRecord record_from_json(const nlohmann::json& doc) {
    if (!doc.is_object() || !doc.contains("id") || !doc["id"].is_string())
        throw Error(ErrorCode::SchemaViolation, "record needs a string \"id\"");
    StoredRecord r;
    r.id = doc["id"].get<std::string>();
    if (r.id.empty()) throw Error(ErrorCode::SchemaViolation, "record id must be non-empty");
    if (doc.contains("fields")) {
        if (!doc["fields"].is_object()) throw Error(ErrorCode::SchemaViolation, "\"fields\" must be an object");
        for (const auto& [k, v] : doc["fields"].items()) {
            if (!v.is_string()) throw Error(ErrorCode::SchemaViolation, "field " + k + " must be a string");
            r.fields[k] = v.get<std::string>();
        }
    }
    return r;
}

bool is_valid_user(std::string_view user) noexcept {
    if (user.empty() || user.size() > 128) return false;
    return std::all_of(user.begin(), user.end(), [](char c) {
        return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' ||
               c == '.' || c == '@' || c == '-';
    });
}

namespace {

void check_user(const std::string& user) {
    if (!is_valid_user(user)) throw Error(ErrorCode::UnknownUser, "invalid user name");
}

// Reads complete lines; a trailing fragment without '\n' is a torn append and
// is dropped and reported through torn.
std::vector<std::string> read_lines(const fs::path& path, bool& torn) {
    std::vector<std::string> lines;
    torn = false;
    std::ifstream in(path, std::ios::binary);
    if (!in) return lines;
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::size_t start = 0;
    for (std::size_t nl; (nl = content.find('\n', start)) != std::string::npos; start = nl + 1)
        if (nl > start) lines.push_back(content.substr(start, nl - start));
    torn = start < content.size();
    return lines;
}

void rewrite(const fs::path& path, const std::string& content) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << content;
        out.flush();
        if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
    }
    fs::rename(tmp, path);
}

} // namespace

RecordStore::RecordStore(StoreSchema schema, fs::path data_dir) : schema_(std::move(schema)), dir_(std::move(data_dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir_.string() + ": " + ec.message());
    for (const auto& [id, spec] : schema_.fields())
        if (spec.encrypted) index_[id];
    replay_records();
    replay_users();
    records_out_.open(records_path(), std::ios::binary | std::ios::app);
    users_out_.open(users_path(), std::ios::binary | std::ios::app);
    if (!records_out_ || !users_out_) throw Error(ErrorCode::IoError, "cannot open store files in " + dir_.string());
}

void RecordStore::validate(const StoredRecord& record) const {
    if (record.id.empty()) throw Error(ErrorCode::SchemaViolation, "record id must be non-empty");
    for (const auto& [field, value] : record.fields) {
        const FieldSpec* spec = schema_.find(field);
        if (spec == nullptr) throw Error(ErrorCode::SchemaViolation, "record " + record.id + ": unknown field " + field);
        if (!spec->encrypted) continue;
        FieldCiphertext ct;
        try {
            ct = parse(value, spec->token_width);
        } catch (const Error& e) {
            // Something that is not even shaped like a ciphertext is clear text
            // in an encrypted column.
            if (e.reason() == MalformedReason::bad_section_count)
                throw Error(ErrorCode::SchemaViolation, "record " + record.id + ": field " + field + " is not encrypted");
            throw Error(e.reason(), "record " + record.id + ", field " + field);
        }
        if (ct.declared_pref_len != spec->pref_len)
            throw Error(ErrorCode::SchemaViolation,
                        "record " + record.id + ": field " + field + " has the wrong prefix length");
    }
}

void RecordStore::apply(StoredRecord record) {
    const auto found = by_id_.find(record.id);
    std::size_t pos;
    if (found != by_id_.end()) {
        pos = found->second;
        for (const auto& [field, value] : records_[pos].fields) {
            auto idx = index_.find(field);
            if (idx == index_.end()) continue;
            auto [lo, hi] = idx->second.equal_range(value);
            for (auto it = lo; it != hi; ++it)
                if (it->second == pos) {
                    idx->second.erase(it);
                    break;
                }
        }
        records_[pos] = std::move(record);
    } else {
        pos = records_.size();
        by_id_.emplace(record.id, pos);
        records_.push_back(std::move(record));
    }
    for (const auto& [field, value] : records_[pos].fields) {
        auto idx = index_.find(field);
        if (idx != index_.end()) idx->second.emplace(value, pos);
    }
}

void RecordStore::replay_records() {
    bool torn = false;
    const auto lines = read_lines(records_path(), torn);
    for (const auto& line : lines) {
        StoredRecord r;
        try {
            r = record_from_json(nlohmann::json::parse(line));
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::IoError, "corrupt line in " + records_path().string());
        }
        validate(r);
        apply(std::move(r));
    }
    // Rewriting also cuts a torn tail, so later appends start on a fresh line.
    if (torn || lines.size() != records_.size()) {
        std::string compact;
        for (const auto& r : records_) compact += to_json(r).dump() + "\n";
        rewrite(records_path(), compact);
    }
}

void RecordStore::replay_users() {
    bool torn = false;
    const auto lines = read_lines(users_path(), torn);
    std::string intact;
    for (const auto& line : lines) {
        intact += line;
        intact += '\n';
        try {
            const auto doc = nlohmann::json::parse(line);
            auto& u = users_[doc.at("user").get<std::string>()];
            if (doc.contains("salt")) u.salt = doc["salt"].get<std::string>();
            if (doc.contains("words")) u.words = doc["words"].get<std::vector<std::string>>();
        } catch (const nlohmann::json::exception&) {
            throw Error(ErrorCode::IoError, "corrupt line in " + users_path().string());
        }
    }
    if (torn) rewrite(users_path(), intact);
}

void RecordStore::append_lines(std::ofstream& out, const std::string& lines) {
    out << lines;
    out.flush();
    if (!out) throw Error(ErrorCode::IoError, "append to store failed");
}

std::size_t RecordStore::ingest(std::vector<StoredRecord> batch) {
    for (const auto& r : batch) validate(r);
    std::string lines;
    for (const auto& r : batch) lines += to_json(r).dump() + "\n";
    std::lock_guard writer(write_mu_);
    append_lines(records_out_, lines);
    std::unique_lock lock(mu_);
    const std::size_t n = batch.size();
    for (auto& r : batch) apply(std::move(r));
    return n;
}

std::vector<StoredRecord> RecordStore::query(std::string_view field_id, std::string_view token) const {
    const FieldSpec* spec = schema_.find(field_id);
    if (spec == nullptr) throw Error(ErrorCode::UnknownField, std::string(field_id));
    if (!spec->encrypted) throw Error(ErrorCode::NotEncryptedField, std::string(field_id));
    std::shared_lock lock(mu_);
    const auto& idx = index_.find(field_id)->second;
    std::vector<std::size_t> hits;
    for (auto it = idx.lower_bound(token); it != idx.end() && match_prefix(it->first, token); ++it)
        hits.push_back(it->second);
    std::sort(hits.begin(), hits.end());
    std::vector<StoredRecord> out;
    out.reserve(hits.size());
    for (std::size_t p : hits) out.push_back(records_[p]);
    return out;
}

void RecordStore::put_salt(const std::string& user, std::string_view salt_hex) {
    check_user(user);
    if (!salt_from_hex(salt_hex)) throw Error(ErrorCode::InvalidSalt, "salt must be 32 hex characters");
    const std::string line = nlohmann::json{{"user", user}, {"salt", salt_hex}}.dump() + "\n";
    std::lock_guard writer(write_mu_);
    append_lines(users_out_, line);
    std::unique_lock lock(mu_);
    users_[user].salt = std::string(salt_hex);
}

std::string RecordStore::get_salt(const std::string& user) const {
    std::shared_lock lock(mu_);
    const auto it = users_.find(user);
    if (it == users_.end() || it->second.salt.empty()) throw Error(ErrorCode::UnknownUser, user);
    return it->second.salt;
}

void RecordStore::put_checkwords(const std::string& user, const CheckWordSet& words) {
    check_user(user);
    if (words.words.size() < kCheckWords.size())
        throw Error(ErrorCode::InvalidCheckWords, "at least three check-words are required");
    for (const auto& w : words.words) {
        const FieldCiphertext ct = parse(w);
        if (ct.declared_pref_len != 0) throw Error(ErrorCode::InvalidCheckWords, "check-words use prefix length 0");
    }
    const std::string line = nlohmann::json{{"user", user}, {"words", words.words}}.dump() + "\n";
    std::lock_guard writer(write_mu_);
    append_lines(users_out_, line);
    std::unique_lock lock(mu_);
    users_[user].words = words.words;
}

CheckWordSet RecordStore::get_checkwords(const std::string& user) const {
    std::shared_lock lock(mu_);
    const auto it = users_.find(user);
    if (it == users_.end() || it->second.words.empty()) throw Error(ErrorCode::UnknownUser, user);
    return CheckWordSet{it->second.words};
}

std::size_t RecordStore::size() const {
    std::shared_lock lock(mu_);
    return records_.size();
}

} // namespace prefixseal::store
