#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include <json.hpp>

#include "prefixseal/field_codec.hpp"

namespace prefixseal::store {

struct FieldSpec {
    bool encrypted = false;
    unsigned pref_len = 0;
    std::size_t token_width = kDefaultTokenWidth;
};

// {"fields":{"<id>":{"encrypted":bool,"pref_len":int}}}; an encrypted field
// may also carry "token_width". pref_len is present iff encrypted.
class StoreSchema {
public:
    static StoreSchema from_json(const nlohmann::json& doc, std::size_t default_token_width = kDefaultTokenWidth);
    static StoreSchema load(const std::filesystem::path& path, std::size_t default_token_width = kDefaultTokenWidth);

    nlohmann::json to_json() const;

    void add(const std::string& field_id, FieldSpec spec);
    const FieldSpec* find(std::string_view field_id) const;
    const std::map<std::string, FieldSpec, std::less<>>& fields() const noexcept { return fields_; }

private:
    std::map<std::string, FieldSpec, std::less<>> fields_;
};

} // namespace prefixseal::store
