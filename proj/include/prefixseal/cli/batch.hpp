#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "prefixseal/cli/csv.hpp"
#include "prefixseal/key_derivation.hpp"
#include "prefixseal/store/record_store.hpp"

namespace prefixseal::cli {

struct BatchOptions {
    // 0 means std::thread::hardware_concurrency().
    std::size_t threads = 0;
    // Test hook: sees each fresh ciphertext before it is validated.
    std::function<void(std::size_t row, const std::string& field, std::string& ciphertext)> tamper;
};

// Turns a CSV table (header row first) into store records. Every encrypted
// cell is decrypted again and compared with its normalized input; the first
// failure aborts the batch with ValidationFailed naming row and field. Row
// numbers count data rows from 1. Output order follows input order.
std::vector<store::StoredRecord> encrypt_table(const std::vector<CsvRow>& table, const store::StoreSchema& schema,
                                               const KeyRing& ring, const BatchOptions& options = {});

// encrypt_table over a CSV file, written as JSON lines. The output appears
// atomically: nothing is left behind if any row fails.
std::size_t encrypt_file(const std::filesystem::path& input, const std::filesystem::path& output,
                         const store::StoreSchema& schema, const KeyRing& ring, const BatchOptions& options = {});

} // namespace prefixseal::cli
