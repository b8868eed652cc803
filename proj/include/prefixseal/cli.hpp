#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "prefixseal/error.hpp"
#include "prefixseal/key_derivation.hpp"

namespace prefixseal::cli {

// 0 ok, 2 usage or missing password, 3 authentication or wrong password,
// 4 malformed ciphertext or schema violation, 1 anything else.
int exit_code_for(ErrorCode code) noexcept;

// Entry point of the prefixseal tool. Never throws.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

struct BenchRow {
    std::string operation;
    std::size_t entries = 0;
    double seconds = 0;
};

// One timed row per operation over synthetic names; "cycle" is encrypt plus
// decrypt plus compare. No rows for entries == 0.
std::vector<BenchRow> run_bench(const KeyRing& ring, std::size_t entries, unsigned pref_len,
                                std::size_t token_width);

// "operation,entries,seconds,ops_per_sec" header plus one line per row.
void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows);

} // namespace prefixseal::cli
