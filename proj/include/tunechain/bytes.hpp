#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tunechain/errors.hpp"

namespace tunechain {

using Bytes = std::vector<std::uint8_t>;

std::string to_hex(std::span<const std::uint8_t> data);
Bytes from_hex(std::string_view hex);

// Fixed-length byte string with lowercase-hex rendering. Comparison is
// big-endian lexicographic, so it matches the numeric order of the value.
template <std::size_t N>
struct FixedBytes {
    std::array<std::uint8_t, N> bytes{};

    static constexpr std::size_t size() { return N; }

    static FixedBytes from_span(std::span<const std::uint8_t> src) {
        if (src.size() != N) throw InvalidInput("expected " + std::to_string(N) + " bytes");
        FixedBytes out;
        std::copy(src.begin(), src.end(), out.bytes.begin());
        return out;
    }

    static FixedBytes parse_hex(std::string_view hex) {
        return from_span(from_hex(hex));
    }

    std::string hex() const { return to_hex(bytes); }

    bool is_zero() const {
        for (auto b : bytes)
            if (b != 0) return false;
        return true;
    }

    std::uint8_t* data() { return bytes.data(); }
    const std::uint8_t* data() const { return bytes.data(); }

    auto operator<=>(const FixedBytes&) const = default;
};

using Hash32 = FixedBytes<32>;
using Address = FixedBytes<20>;

void append_bytes(Bytes& out, std::span<const std::uint8_t> src);
void append_u32_be(Bytes& out, std::uint32_t v);
void append_u64_be(Bytes& out, std::uint64_t v);

std::uint32_t read_u32_be(std::span<const std::uint8_t> src);
std::uint64_t read_u64_be(std::span<const std::uint8_t> src);

inline std::span<const std::uint8_t> as_bytes(std::string_view s) {
    return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

}  // namespace tunechain
