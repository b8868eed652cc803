#pragma once

#include "prefixseal/bytes.hpp"
#include "prefixseal/kernels/kernels.hpp"

namespace prefixseal::crypto {

struct Argon2Params {
    std::uint32_t time_cost = 3;
    std::uint32_t memory_cost_kib = 65536;
    std::uint32_t parallelism = 1;
    std::uint32_t tag_length = 32;
};

struct Argon2Inputs {
    ByteView password{};
    ByteView salt{};
    ByteView secret{};
    ByteView associated_data{};
};

// Argon2id, version 0x13 (RFC 9106). Lanes of one slice run on separate
// threads when parallelism > 1. Throws InvalidParams on out-of-range costs.
Bytes argon2id(const Argon2Inputs& in, const Argon2Params& params,
               const kernels::Argon2Kernel& kernel = kernels::default_argon2());

} // namespace prefixseal::crypto
