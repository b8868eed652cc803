#include "prefixseal/crypto/argon2.hpp"

#include <cstring>
#include <thread>
#include <vector>

#include "prefixseal/crypto/blake2b.hpp"
#include "prefixseal/error.hpp"

namespace prefixseal::crypto {

namespace {

using kernels::Argon2Block;
using kernels::kArgon2BlockWords;

constexpr std::uint32_t kVersion = 0x13;
constexpr std::uint32_t kTypeId = 2;
constexpr std::uint32_t kSyncPoints = 4;
constexpr std::size_t kBlockBytes = 1024;
constexpr std::size_t kAddressesPerBlock = kArgon2BlockWords;

void put_le32(Blake2b& h, std::uint32_t v) {
    const std::uint8_t b[4] = {static_cast<std::uint8_t>(v), static_cast<std::uint8_t>(v >> 8),
                               static_cast<std::uint8_t>(v >> 16), static_cast<std::uint8_t>(v >> 24)};
    h.update(ByteView(b, 4));
}

void put_le32(std::uint8_t* p, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) p[i] = static_cast<std::uint8_t>(v >> (8 * i));
}

// H' : variable-length hash built from chained BLAKE2b-512 calls.
void hash_long(ByteView input, std::span<std::uint8_t> out) {
    const auto t = static_cast<std::uint32_t>(out.size());
    if (out.size() <= Blake2b::kMaxDigest) {
        Blake2b h(out.size());
        put_le32(h, t);
        h.update(input);
        h.finalize(out);
        return;
    }
    std::uint8_t v[64];
    Blake2b first(64);
    put_le32(first, t);
    first.update(input);
    first.finalize(v);
    std::size_t written = 0;
    std::memcpy(out.data(), v, 32);
    written += 32;
    while (out.size() - written > 64) {
        Blake2b h(64);
        h.update(ByteView(v, 64));
        h.finalize(v);
        std::memcpy(out.data() + written, v, 32);
        written += 32;
    }
    const std::size_t rest = out.size() - written;
    Blake2b last(rest);
    last.update(ByteView(v, 64));
    last.finalize(out.subspan(written));
    secure_wipe(v, sizeof v);
}

void block_from_bytes(Argon2Block& b, const std::uint8_t* p) noexcept {
    for (std::size_t i = 0; i < kArgon2BlockWords; ++i) {
        std::uint64_t w = 0;
        for (int j = 7; j >= 0; --j) w = (w << 8) | p[8 * i + j];
        b.v[i] = w;
    }
}

void block_to_bytes(const Argon2Block& b, std::uint8_t* p) noexcept {
    for (std::size_t i = 0; i < kArgon2BlockWords; ++i)
        for (int j = 0; j < 8; ++j) p[8 * i + j] = static_cast<std::uint8_t>(b.v[i] >> (8 * j));
}

class Instance {
public:
    Instance(const Argon2Params& params, const kernels::Argon2Kernel& kernel)
        : passes_(params.time_cost), lanes_(params.parallelism), kernel_(kernel) {
        const std::uint32_t per_sync = params.memory_cost_kib / (kSyncPoints * lanes_);
        segment_length_ = per_sync;
        lane_length_ = segment_length_ * kSyncPoints;
        memory_blocks_ = lane_length_ * lanes_;
        memory_.resize(memory_blocks_);
    }

    ~Instance() { secure_wipe(memory_.data(), memory_.size() * sizeof(Argon2Block)); }

    void initialize(const std::uint8_t h0[64]) {
        std::uint8_t seed[72];
        std::uint8_t block[kBlockBytes];
        std::memcpy(seed, h0, 64);
        for (std::uint32_t lane = 0; lane < lanes_; ++lane) {
            for (std::uint32_t j = 0; j < 2; ++j) {
                put_le32(seed + 64, j);
                put_le32(seed + 68, lane);
                hash_long(ByteView(seed, sizeof seed), block);
                block_from_bytes(memory_[lane * lane_length_ + j], block);
            }
        }
        secure_wipe(seed, sizeof seed);
        secure_wipe(block, sizeof block);
    }

    void fill() {
        for (std::uint32_t pass = 0; pass < passes_; ++pass) {
            for (std::uint32_t slice = 0; slice < kSyncPoints; ++slice) {
                if (lanes_ == 1) {
                    fill_segment(pass, 0, slice);
                    continue;
                }
                std::vector<std::jthread> workers;
                workers.reserve(lanes_ - 1);
                for (std::uint32_t lane = 1; lane < lanes_; ++lane)
                    workers.emplace_back([this, pass, lane, slice] { fill_segment(pass, lane, slice); });
                fill_segment(pass, 0, slice);
            }
        }
    }

    void finalize(std::span<std::uint8_t> out) {
        Argon2Block acc = memory_[lane_length_ - 1];
        for (std::uint32_t lane = 1; lane < lanes_; ++lane) {
            const Argon2Block& last = memory_[lane * lane_length_ + lane_length_ - 1];
            for (std::size_t i = 0; i < kArgon2BlockWords; ++i) acc.v[i] ^= last.v[i];
        }
        std::uint8_t bytes[kBlockBytes];
        block_to_bytes(acc, bytes);
        hash_long(ByteView(bytes, sizeof bytes), out);
        secure_wipe(bytes, sizeof bytes);
        secure_wipe(acc.v.data(), sizeof acc.v);
    }

    std::uint32_t memory_blocks() const noexcept { return memory_blocks_; }

private:
    std::uint32_t reference_index(std::uint32_t pass, std::uint32_t slice, std::uint32_t index,
                                  std::uint64_t pseudo_rand, bool same_lane) const noexcept {
        std::uint64_t area;
        if (pass == 0) {
            if (slice == 0) {
                area = index - 1;
            } else if (same_lane) {
                area = static_cast<std::uint64_t>(slice) * segment_length_ + index - 1;
            } else {
                area = static_cast<std::uint64_t>(slice) * segment_length_ - (index == 0 ? 1 : 0);
            }
        } else {
            area = same_lane ? lane_length_ - segment_length_ + index - 1
                             : lane_length_ - segment_length_ - (index == 0 ? 1 : 0);
        }
        std::uint64_t rel = pseudo_rand & 0xffffffffULL;
        rel = (rel * rel) >> 32;
        rel = area - 1 - ((area * rel) >> 32);
        std::uint64_t start = 0;
        if (pass != 0) start = slice == kSyncPoints - 1 ? 0 : static_cast<std::uint64_t>(slice + 1) * segment_length_;
        return static_cast<std::uint32_t>((start + rel) % lane_length_);
    }

    void fill_segment(std::uint32_t pass, std::uint32_t lane, std::uint32_t slice) {
        const bool data_independent = pass == 0 && slice < kSyncPoints / 2;
        Argon2Block zero;
        Argon2Block input;
        Argon2Block address;
        auto next_addresses = [&] {
            ++input.v[6];
            kernel_.fill_block(zero, input, address, false);
            kernel_.fill_block(zero, address, address, false);
        };
        if (data_independent) {
            input.v[0] = pass;
            input.v[1] = lane;
            input.v[2] = slice;
            input.v[3] = memory_blocks_;
            input.v[4] = passes_;
            input.v[5] = kTypeId;
        }
        std::uint32_t start = 0;
        if (pass == 0 && slice == 0) {
            start = 2;
            if (data_independent) next_addresses();
        }
        std::uint64_t curr = static_cast<std::uint64_t>(lane) * lane_length_ +
                             static_cast<std::uint64_t>(slice) * segment_length_ + start;
        std::uint64_t prev = curr % lane_length_ == 0 ? curr + lane_length_ - 1 : curr - 1;
        for (std::uint32_t i = start; i < segment_length_; ++i, ++curr, ++prev) {
            if (curr % lane_length_ == 1) prev = curr - 1;
            std::uint64_t pseudo;
            if (data_independent) {
                if (i % kAddressesPerBlock == 0) next_addresses();
                pseudo = address.v[i % kAddressesPerBlock];
            } else {
                pseudo = memory_[prev].v[0];
            }
            std::uint32_t ref_lane = static_cast<std::uint32_t>((pseudo >> 32) % lanes_);
            if (pass == 0 && slice == 0) ref_lane = lane;
            const std::uint32_t ref_index = reference_index(pass, slice, i, pseudo, ref_lane == lane);
            const Argon2Block& ref = memory_[static_cast<std::uint64_t>(ref_lane) * lane_length_ + ref_index];
            kernel_.fill_block(memory_[prev], ref, memory_[curr], pass != 0);
        }
    }

    std::uint32_t passes_;
    std::uint32_t lanes_;
    std::uint32_t segment_length_ = 0;
    std::uint32_t lane_length_ = 0;
    std::uint32_t memory_blocks_ = 0;
    const kernels::Argon2Kernel& kernel_;
    std::vector<Argon2Block> memory_;
};

} // namespace

Bytes argon2id(const Argon2Inputs& in, const Argon2Params& params, const kernels::Argon2Kernel& kernel) {
    if (params.parallelism == 0 || params.parallelism > 0xFFFFFFu)
        throw Error(ErrorCode::InvalidParams, "parallelism must be in 1..2^24-1");
    if (params.time_cost == 0) throw Error(ErrorCode::InvalidParams, "time cost must be >= 1");
    if (static_cast<std::uint64_t>(params.memory_cost_kib) < 8ULL * params.parallelism)
        throw Error(ErrorCode::InvalidParams, "memory cost must be >= 8 * parallelism KiB");
    if (params.tag_length < 4) throw Error(ErrorCode::InvalidParams, "tag length must be >= 4");
    if (in.salt.size() < 8) throw Error(ErrorCode::InvalidParams, "salt must be >= 8 bytes");

    Blake2b h(64);
    put_le32(h, params.parallelism);
    put_le32(h, params.tag_length);
    put_le32(h, params.memory_cost_kib);
    put_le32(h, params.time_cost);
    put_le32(h, kVersion);
    put_le32(h, kTypeId);
    for (ByteView part : {in.password, in.salt, in.secret, in.associated_data}) {
        put_le32(h, static_cast<std::uint32_t>(part.size()));
        h.update(part);
    }
    std::uint8_t h0[64];
    h.finalize(h0);

    Instance instance(params, kernel);
    instance.initialize(h0);
    secure_wipe(h0, sizeof h0);
    instance.fill();
    Bytes tag(params.tag_length);
    instance.finalize(tag);
    return tag;
}

} // namespace prefixseal::crypto
