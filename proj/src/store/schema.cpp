#include "prefixseal/store/schema.hpp"

#include <fstream>

#include "prefixseal/error.hpp"

namespace prefixseal::store {

StoreSchema StoreSchema::from_json(const nlohmann::json& doc, std::size_t default_token_width) {
    if (!doc.is_object() || !doc.contains("fields") || !doc["fields"].is_object())
        throw Error(ErrorCode::SchemaViolation, "schema needs a \"fields\" object");
    StoreSchema schema;
    for (const auto& [id, entry] : doc["fields"].items()) {
        if (!entry.is_object() || !entry.contains("encrypted") || !entry["encrypted"].is_boolean())
            throw Error(ErrorCode::SchemaViolation, "field " + id + " needs a boolean \"encrypted\"");
        FieldSpec spec;
        spec.encrypted = entry["encrypted"].get<bool>();
        const bool has_pref = entry.contains("pref_len");
        if (spec.encrypted != has_pref)
            throw Error(ErrorCode::SchemaViolation, "field " + id + ": pref_len must be present iff encrypted");
        if (has_pref) {
            if (!entry["pref_len"].is_number_unsigned() || entry["pref_len"].get<unsigned>() > kMaxPrefixLength)
                throw Error(ErrorCode::SchemaViolation, "field " + id + ": pref_len must be 0..255");
            spec.pref_len = entry["pref_len"].get<unsigned>();
        }
        spec.token_width = default_token_width;
        if (entry.contains("token_width")) {
            if (!spec.encrypted || !entry["token_width"].is_number_unsigned())
                throw Error(ErrorCode::SchemaViolation, "field " + id + ": bad token_width");
            spec.token_width = entry["token_width"].get<std::size_t>();
        }
        schema.add(id, spec);
    }
    return schema;
}

StoreSchema StoreSchema::load(const std::filesystem::path& path, std::size_t default_token_width) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot read schema " + path.string());
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::SchemaViolation, std::string("schema is not JSON: ") + e.what());
    }
    return from_json(doc, default_token_width);
}

nlohmann::json StoreSchema::to_json() const {
    nlohmann::json fields = nlohmann::json::object();
    for (const auto& [id, spec] : fields_) {
        nlohmann::json e = {{"encrypted", spec.encrypted}};
        if (spec.encrypted) {
            e["pref_len"] = spec.pref_len;
            e["token_width"] = spec.token_width;
        }
        fields[id] = e;
    }
    return {{"fields", fields}};
}

void StoreSchema::add(const std::string& field_id, FieldSpec spec) {
    if (!FieldId::is_valid(field_id)) throw Error(ErrorCode::SchemaViolation, "invalid field id " + field_id);
    if (spec.encrypted && (spec.token_width == 0 || spec.token_width > kMaxTokenWidth))
        throw Error(ErrorCode::SchemaViolation, "field " + field_id + ": token_width must be 1..16");
    if (spec.pref_len > kMaxPrefixLength) throw Error(ErrorCode::SchemaViolation, "pref_len must be 0..255");
    fields_[field_id] = spec;
}

const FieldSpec* StoreSchema::find(std::string_view field_id) const {
    const auto it = fields_.find(field_id);
    return it == fields_.end() ? nullptr : &it->second;
}

} // namespace prefixseal::store
