#include <cstring>

#include "tunechain/errors.hpp"
#include "tunechain/fingerprint.hpp"

namespace tunechain {

namespace {

std::uint32_t read_u32_le(std::span<const std::uint8_t> src, std::size_t at) {
    return static_cast<std::uint32_t>(src[at]) | static_cast<std::uint32_t>(src[at + 1]) << 8 |
           static_cast<std::uint32_t>(src[at + 2]) << 16 |
           static_cast<std::uint32_t>(src[at + 3]) << 24;
}

std::uint16_t read_u16_le(std::span<const std::uint8_t> src, std::size_t at) {
    return static_cast<std::uint16_t>(src[at] | src[at + 1] << 8);
}

bool tag_is(std::span<const std::uint8_t> src, std::size_t at, const char* tag) {
    return std::memcmp(src.data() + at, tag, 4) == 0;
}

}  // namespace

PcmAudio read_wav(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 12 || !tag_is(bytes, 0, "RIFF") || !tag_is(bytes, 8, "WAVE"))
        throw UnsupportedFormat("not a RIFF/WAVE file");

    std::uint16_t format_code = 0;
    std::uint16_t channels = 0;
    std::uint16_t bits_per_sample = 0;
    std::uint32_t sample_rate = 0;
    bool have_fmt = false;

    std::size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        std::uint32_t chunk_size = read_u32_le(bytes, pos + 4);
        std::size_t body = pos + 8;

        if (tag_is(bytes, pos, "fmt ")) {
            if (chunk_size < 16 || body + 16 > bytes.size())
                throw MalformedFile("truncated fmt chunk");
            format_code = read_u16_le(bytes, body);
            channels = read_u16_le(bytes, body + 2);
            sample_rate = read_u32_le(bytes, body + 4);
            bits_per_sample = read_u16_le(bytes, body + 14);
            have_fmt = true;
        } else if (tag_is(bytes, pos, "data")) {
            if (!have_fmt) throw MalformedFile("data chunk before fmt chunk");
            if (format_code != 1) throw UnsupportedFormat("only uncompressed PCM is supported");
            if (bits_per_sample != 16) throw UnsupportedFormat("only 16-bit samples are supported");
            if (channels != 1 && channels != 2)
                throw UnsupportedFormat("only mono or stereo is supported");
            if (sample_rate == 0) throw MalformedFile("zero sample rate");
            if (body + chunk_size > bytes.size())
                throw MalformedFile("data chunk shorter than declared");

            std::size_t frame_bytes = 2u * channels;
            std::size_t frame_count = chunk_size / frame_bytes;
            if (frame_count == 0) throw InvalidInput("audio holds no samples");

            PcmAudio audio;
            audio.sample_rate = sample_rate;
            audio.samples.reserve(frame_count);
            for (std::size_t i = 0; i < frame_count; ++i) {
                std::size_t at = body + i * frame_bytes;
                auto sample_at = [&](std::size_t channel) {
                    return static_cast<std::int16_t>(read_u16_le(bytes, at + 2 * channel));
                };
                if (channels == 1) {
                    audio.samples.push_back(sample_at(0));
                } else {
                    // Channel mean, rounded toward zero.
                    int mixed = (static_cast<int>(sample_at(0)) + static_cast<int>(sample_at(1))) / 2;
                    audio.samples.push_back(static_cast<std::int16_t>(mixed));
                }
            }
            return audio;
        }

        // Chunks are word-aligned; skip the pad byte on odd sizes.
        std::size_t advance = chunk_size + (chunk_size % 2);
        if (body + advance < body || body + advance > bytes.size()) {
            if (tag_is(bytes, pos, "data") || tag_is(bytes, pos, "fmt "))
                throw MalformedFile("chunk shorter than declared");
            break;
        }
        pos = body + advance;
    }
    throw MalformedFile("missing data chunk");
}

}  // namespace tunechain
