#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace prefixseal::cli {

// Deterministic synthetic Italian-style surnames (with occasional accented
// letters) for benchmarks and fixtures. No real person data.
std::vector<std::string> synthetic_names(std::size_t count, std::uint64_t seed = 1);

} // namespace prefixseal::cli
