#pragma once

#include <memory>
#include <string>
#include <thread>

#include "prefixseal/error.hpp"
#include "prefixseal/store/record_store.hpp"

namespace httplib {
class Server;
}

namespace prefixseal::store {

// HTTP/1.1 + JSON front end for a RecordStore.
//
//   POST /v1/records                 {"records":[...]}      -> {"ingested":N}
//   GET  /v1/search?field=F&token=T                         -> {"records":[...]}
//   PUT  /v1/users/{u}/salt          {"salt":"<32 hex>"}     (GET returns the same shape)
//   PUT  /v1/users/{u}/checkwords    {"words":["v1.00..."]}  (GET returns the same shape)
//
// Failures answer {"error":"<ErrorCode name>"}: 404 for UnknownUser and
// UnknownField, 400 otherwise.
class StoreServer {
public:
    explicit StoreServer(RecordStore& store);
    ~StoreServer();

    StoreServer(const StoreServer&) = delete;
    StoreServer& operator=(const StoreServer&) = delete;

    // Port 0 picks an ephemeral port. Returns the bound port.
    int bind(const std::string& host, int port);
    // Blocks until stop().
    void run();
    // run() on a background thread.
    void start();
    void stop();

private:
    RecordStore& store_;
    std::unique_ptr<httplib::Server> server_;
    std::thread thread_;
};

int http_status_for(ErrorCode code) noexcept;

} // namespace prefixseal::store
