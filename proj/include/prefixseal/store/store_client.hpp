#pragma once

#include <memory>
#include <string>
#include <vector>

#include "prefixseal/store/record_store.hpp"

namespace httplib {
class Client;
}

namespace prefixseal::store {

// Blocking client for the StoreServer API. Server-side error codes are
// rethrown as Error with the matching ErrorCode; transport failures become
// ServerError.
class StoreClient {
public:
    explicit StoreClient(const std::string& base_url);
    ~StoreClient();

    std::size_t ingest(const std::vector<StoredRecord>& records);
    std::vector<StoredRecord> search(const std::string& field_id, const std::string& token);

    void put_salt(const std::string& user, const Salt& salt);
    Salt get_salt(const std::string& user);
    void put_checkwords(const std::string& user, const CheckWordSet& words);
    CheckWordSet get_checkwords(const std::string& user);

private:
    std::unique_ptr<httplib::Client> client_;
};

} // namespace prefixseal::store
