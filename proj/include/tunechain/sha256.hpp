#pragma once

#include <cstdint>
#include <span>
#include <string_view>

#include "tunechain/bytes.hpp"

namespace tunechain {

// Incremental SHA-256 (FIPS 180-4).
class Sha256 {
public:
    Sha256() { reset(); }

    void reset();
    Sha256& update(std::span<const std::uint8_t> data);
    Sha256& update(std::string_view text) { return update(as_bytes(text)); }
    Hash32 finish();

private:
    void compress(const std::uint8_t* block);

    std::uint32_t state_[8];
    std::uint8_t buffer_[64];
    std::size_t buffered_ = 0;
    std::uint64_t total_bytes_ = 0;
};

Hash32 sha256(std::span<const std::uint8_t> data);
Hash32 sha256(std::string_view text);

// SHA-256 applied twice, the block-header hashing convention.
Hash32 sha256d(std::span<const std::uint8_t> data);

}  // namespace tunechain
