#include "tunechain/bytes.hpp"

namespace tunechain {

static constexpr char kHexDigits[] = "0123456789abcdef";

std::string to_hex(std::span<const std::uint8_t> data) {
    std::string out;
    out.reserve(data.size() * 2);
    for (auto b : data) {
        out.push_back(kHexDigits[b >> 4]);
        out.push_back(kHexDigits[b & 0x0f]);
    }
    return out;
}

static int hex_nibble(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

Bytes from_hex(std::string_view hex) {
    if (hex.size() % 2 != 0) throw InvalidInput("odd-length hex string");
    Bytes out;
    out.reserve(hex.size() / 2);
    for (std::size_t i = 0; i < hex.size(); i += 2) {
        int hi = hex_nibble(hex[i]);
        int lo = hex_nibble(hex[i + 1]);
        if (hi < 0 || lo < 0) throw InvalidInput("invalid hex digit");
        out.push_back(static_cast<std::uint8_t>(hi << 4 | lo));
    }
    return out;
}

void append_bytes(Bytes& out, std::span<const std::uint8_t> src) {
    out.insert(out.end(), src.begin(), src.end());
}

void append_u32_be(Bytes& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

void append_u64_be(Bytes& out, std::uint64_t v) {
    for (int shift = 56; shift >= 0; shift -= 8)
        out.push_back(static_cast<std::uint8_t>(v >> shift));
}

std::uint32_t read_u32_be(std::span<const std::uint8_t> src) {
    if (src.size() < 4) throw InvalidInput("short read for u32");
    return static_cast<std::uint32_t>(src[0]) << 24 | static_cast<std::uint32_t>(src[1]) << 16 |
           static_cast<std::uint32_t>(src[2]) << 8 | static_cast<std::uint32_t>(src[3]);
}

std::uint64_t read_u64_be(std::span<const std::uint8_t> src) {
    if (src.size() < 8) throw InvalidInput("short read for u64");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = v << 8 | src[i];
    return v;
}

}  // namespace tunechain
