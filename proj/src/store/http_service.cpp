#include "prefixseal/store/http_service.hpp"

#include <httplib.h>

#include "prefixseal/error.hpp"

namespace prefixseal::store {

namespace {

constexpr const char* kJson = "application/json";

void reply_error(httplib::Response& res, ErrorCode code, std::string_view name) {
    res.status = http_status_for(code);
    res.set_content(nlohmann::json{{"error", name}}.dump(), kJson);
}

// Runs a handler and turns thrown errors into the JSON error shape.
template <typename Fn>
httplib::Server::Handler guarded(Fn fn) {
    return [fn](const httplib::Request& req, httplib::Response& res) {
        try {
            fn(req, res);
        } catch (const Error& e) {
            reply_error(res, e.code(), to_string(e.code()));
        } catch (const nlohmann::json::exception&) {
            res.status = 400;
            res.set_content(R"({"error":"BadRequest"})", kJson);
        }
    };
}

nlohmann::json parse_body(const httplib::Request& req) { return nlohmann::json::parse(req.body); }

} // namespace

int http_status_for(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::UnknownUser:
    case ErrorCode::UnknownField: return 404;
    case ErrorCode::IoError: return 500;
    default: return 400;
    }
}

StoreServer::StoreServer(RecordStore& store) : store_(store), server_(std::make_unique<httplib::Server>()) {
    auto& srv = *server_;

    srv.Post("/v1/records", guarded([this](const httplib::Request& req, httplib::Response& res) {
        const auto doc = parse_body(req);
        if (!doc.is_object() || !doc.contains("records") || !doc["records"].is_array())
            throw Error(ErrorCode::SchemaViolation, "body needs a \"records\" array");
        std::vector<StoredRecord> batch;
        batch.reserve(doc["records"].size());
        for (const auto& r : doc["records"]) batch.push_back(record_from_json(r));
        const std::size_t n = store_.ingest(std::move(batch));
        res.set_content(nlohmann::json{{"ingested", n}}.dump(), kJson);
    }));

    srv.Get("/v1/search", guarded([this](const httplib::Request& req, httplib::Response& res) {
        if (!req.has_param("field") || !req.has_param("token")) {
            res.status = 400;
            res.set_content(R"({"error":"BadRequest"})", kJson);
            return;
        }
        nlohmann::json records = nlohmann::json::array();
        for (const auto& r : store_.query(req.get_param_value("field"), req.get_param_value("token")))
            records.push_back(to_json(r));
        res.set_content(nlohmann::json{{"records", records}}.dump(), kJson);
    }));

    srv.Put(R"(/v1/users/([^/]+)/salt)", guarded([this](const httplib::Request& req, httplib::Response& res) {
        const auto doc = parse_body(req);
        if (!doc.is_object() || !doc.contains("salt") || !doc["salt"].is_string())
            throw Error(ErrorCode::InvalidSalt, "body needs a \"salt\" string");
        const std::string salt = doc["salt"].get<std::string>();
        store_.put_salt(req.matches[1], salt);
        res.set_content(nlohmann::json{{"salt", salt}}.dump(), kJson);
    }));

    srv.Get(R"(/v1/users/([^/]+)/salt)", guarded([this](const httplib::Request& req, httplib::Response& res) {
        res.set_content(nlohmann::json{{"salt", store_.get_salt(req.matches[1])}}.dump(), kJson);
    }));

    srv.Put(R"(/v1/users/([^/]+)/checkwords)", guarded([this](const httplib::Request& req, httplib::Response& res) {
        const auto doc = parse_body(req);
        if (!doc.is_object() || !doc.contains("words") || !doc["words"].is_array())
            throw Error(ErrorCode::InvalidCheckWords, "body needs a \"words\" array");
        CheckWordSet set{doc["words"].get<std::vector<std::string>>()};
        store_.put_checkwords(req.matches[1], set);
        res.set_content(nlohmann::json{{"words", set.words}}.dump(), kJson);
    }));

    srv.Get(R"(/v1/users/([^/]+)/checkwords)", guarded([this](const httplib::Request& req, httplib::Response& res) {
        res.set_content(nlohmann::json{{"words", store_.get_checkwords(req.matches[1]).words}}.dump(), kJson);
    }));
}

StoreServer::~StoreServer() { stop(); }

int StoreServer::bind(const std::string& host, int port) {
    if (port == 0) {
        const int bound = server_->bind_to_any_port(host);
        if (bound < 0) throw Error(ErrorCode::IoError, "cannot bind " + host);
        return bound;
    }
    if (!server_->bind_to_port(host, port)) throw Error(ErrorCode::IoError, "cannot bind " + host + ":" + std::to_string(port));
    return port;
}

void StoreServer::run() { server_->listen_after_bind(); }

void StoreServer::start() {
    thread_ = std::thread([this] { run(); });
    server_->wait_until_ready();
}

void StoreServer::stop() {
    if (server_) server_->stop();
    if (thread_.joinable()) thread_.join();
}

} // namespace prefixseal::store
