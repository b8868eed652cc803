#include "prefixseal/store/store_client.hpp"

#include <httplib.h>

#include "prefixseal/error.hpp"

namespace prefixseal::store {

namespace {

constexpr const char* kJson = "application/json";

nlohmann::json unwrap(const httplib::Result& res, const std::string& what) {
    if (!res) throw Error(ErrorCode::ServerError, what + ": " + httplib::to_string(res.error()));
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception&) {
        throw Error(ErrorCode::ServerError, what + ": HTTP " + std::to_string(res->status) + " with non-JSON body");
    }
    if (res->status != 200) {
        const std::string name = doc.is_object() && doc.contains("error") ? doc["error"].get<std::string>() : "";
        const auto code = error_code_from_string(name);
        throw Error(code.value_or(ErrorCode::ServerError),
                    what + ": HTTP " + std::to_string(res->status) + (name.empty() ? "" : " " + name));
    }
    return doc;
}

std::string user_path(const std::string& user, const char* leaf) {
    if (!is_valid_user(user)) throw Error(ErrorCode::UnknownUser, "invalid user name");
    return "/v1/users/" + user + "/" + leaf;
}

} // namespace

StoreClient::StoreClient(const std::string& base_url) : client_(std::make_unique<httplib::Client>(base_url)) {
    if (!client_->is_valid()) throw Error(ErrorCode::ServerError, "invalid server URL " + base_url);
    client_->set_connection_timeout(5);
    client_->set_read_timeout(60);
    client_->set_write_timeout(60);
}

StoreClient::~StoreClient() = default;

std::size_t StoreClient::ingest(const std::vector<StoredRecord>& records) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : records) arr.push_back(to_json(r));
    const auto doc = unwrap(client_->Post("/v1/records", nlohmann::json{{"records", arr}}.dump(), kJson), "ingest");
    return doc.at("ingested").get<std::size_t>();
}

std::vector<StoredRecord> StoreClient::search(const std::string& field_id, const std::string& token) {
    const httplib::Params params{{"field", field_id}, {"token", token}};
    const auto doc = unwrap(client_->Get("/v1/search", params, httplib::Headers{}), "search");
    std::vector<StoredRecord> out;
    for (const auto& r : doc.at("records")) out.push_back(record_from_json(r));
    return out;
}

void StoreClient::put_salt(const std::string& user, const Salt& salt) {
    unwrap(client_->Put(user_path(user, "salt"), nlohmann::json{{"salt", salt_to_hex(salt)}}.dump(), kJson),
           "put salt");
}

Salt StoreClient::get_salt(const std::string& user) {
    const auto doc = unwrap(client_->Get(user_path(user, "salt")), "get salt");
    const auto salt = salt_from_hex(doc.at("salt").get<std::string>());
    if (!salt) throw Error(ErrorCode::InvalidSalt, "server returned a malformed salt");
    return *salt;
}

void StoreClient::put_checkwords(const std::string& user, const CheckWordSet& words) {
    unwrap(client_->Put(user_path(user, "checkwords"), nlohmann::json{{"words", words.words}}.dump(), kJson),
           "put checkwords");
}

CheckWordSet StoreClient::get_checkwords(const std::string& user) {
    const auto doc = unwrap(client_->Get(user_path(user, "checkwords")), "get checkwords");
    return CheckWordSet{doc.at("words").get<std::vector<std::string>>()};
}

} // namespace prefixseal::store
