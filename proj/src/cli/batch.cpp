#include "prefixseal/cli/batch.hpp"

#include <algorithm>
#include <exception>
#include <fstream>
#include <memory>
#include <optional>
#include <thread>

#include "prefixseal/error.hpp"
#include "prefixseal/field_cipher.hpp"

namespace prefixseal::cli {

namespace {

struct Column {
    std::string name;
    const EncryptionContext* ctx = nullptr; // null for clear fields
};

std::string validation_detail(std::size_t row, const std::string& field, std::string_view why) {
    return "row " + std::to_string(row) + ", field " + field + ": " + std::string(why);
}

std::string seal_cell(const Column& col, std::size_t row, const std::string& value, const BatchOptions& options) {
    std::string ct = encrypt_text(*col.ctx, value);
    if (options.tamper) options.tamper(row, col.name, ct);
    std::string back;
    try {
        back = decrypt_text(*col.ctx, ct);
    } catch (const Error& e) {
        throw Error(ErrorCode::ValidationFailed, validation_detail(row, col.name, to_string(e.code())));
    }
    if (back != normalize(value))
        throw Error(ErrorCode::ValidationFailed, validation_detail(row, col.name, "round trip mismatch"));
    return ct;
}

} // namespace

std::vector<store::StoredRecord> encrypt_table(const std::vector<CsvRow>& table, const store::StoreSchema& schema,
                                               const KeyRing& ring, const BatchOptions& options) {
    if (table.empty()) throw Error(ErrorCode::SchemaViolation, "CSV input has no header row");
    const CsvRow& header = table.front();

    std::vector<std::unique_ptr<EncryptionContext>> contexts;
    std::vector<Column> columns;
    std::optional<std::size_t> id_column;
    for (std::size_t c = 0; c < header.size(); ++c) {
        const std::string& name = header[c];
        if (std::count(header.begin(), header.end(), name) > 1)
            throw Error(ErrorCode::SchemaViolation, "duplicate CSV column " + name);
        Column col{name, nullptr};
        if (const auto* spec = schema.find(name)) {
            if (spec->encrypted) {
                contexts.push_back(
                    std::make_unique<EncryptionContext>(ring, FieldId(name), spec->pref_len, spec->token_width));
                col.ctx = contexts.back().get();
            }
        } else if (name == "id") {
            id_column = c;
        } else {
            throw Error(ErrorCode::SchemaViolation, "CSV column " + name + " is not in the schema");
        }
        columns.push_back(std::move(col));
    }

    const std::size_t rows = table.size() - 1;
    for (std::size_t r = 1; r <= rows; ++r)
        if (table[r].size() != header.size())
            throw Error(ErrorCode::SchemaViolation, "row " + std::to_string(r) + " has " +
                                                        std::to_string(table[r].size()) + " cells, expected " +
                                                        std::to_string(header.size()));

    std::vector<store::StoredRecord> out(rows);
    auto convert = [&](std::size_t r) {
        const CsvRow& cells = table[r];
        store::StoredRecord rec;
        rec.id = id_column ? cells[*id_column] : std::to_string(r);
        for (std::size_t c = 0; c < columns.size(); ++c) {
            if (id_column && c == *id_column) continue;
            const Column& col = columns[c];
            rec.fields[col.name] = col.ctx != nullptr ? seal_cell(col, r, cells[c], options) : cells[c];
        }
        out[r - 1] = std::move(rec);
    };

    std::size_t threads = options.threads != 0 ? options.threads : std::thread::hardware_concurrency();
    threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(rows, 1));
    // Each worker takes a contiguous slice and stops at its first failure; the
    // failure with the lowest row number wins so the report is deterministic.
    std::vector<std::exception_ptr> failures(threads);
    std::vector<std::size_t> failed_row(threads, rows + 1);
    {
        std::vector<std::jthread> pool;
        const std::size_t chunk = (rows + threads - 1) / threads;
        for (std::size_t t = 0; t < threads; ++t) {
            const std::size_t begin = 1 + t * chunk;
            const std::size_t end = std::min(rows + 1, begin + chunk);
            auto work = [&, t, begin, end] {
                for (std::size_t r = begin; r < end; ++r) {
                    try {
                        convert(r);
                    } catch (...) {
                        failures[t] = std::current_exception();
                        failed_row[t] = r;
                        return;
                    }
                }
            };
            if (threads == 1) work();
            else pool.emplace_back(work);
        }
    }
    const auto first = std::min_element(failed_row.begin(), failed_row.end());
    if (*first <= rows) std::rethrow_exception(failures[static_cast<std::size_t>(first - failed_row.begin())]);
    return out;
}

std::size_t encrypt_file(const std::filesystem::path& input, const std::filesystem::path& output,
                         const store::StoreSchema& schema, const KeyRing& ring, const BatchOptions& options) {
    std::ifstream in(input, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot read " + input.string());
    const auto records = encrypt_table(read_csv(in), schema, ring, options);

    std::filesystem::path tmp = output;
    tmp += ".partial";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
        for (const auto& rec : records) out << store::to_json(rec).dump() << '\n';
        out.flush();
        if (!out) {
            out.close();
            std::filesystem::remove(tmp);
            throw Error(ErrorCode::IoError, "write failed for " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, output, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw Error(ErrorCode::IoError, "cannot move output into place: " + ec.message());
    }
    return records.size();
}

} // namespace prefixseal::cli
