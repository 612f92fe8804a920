#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tunechain/bytes.hpp"

namespace tunechain {

// Mono 16-bit PCM audio. Stereo inputs are downmixed before construction.
struct PcmAudio {
    std::vector<std::int16_t> samples;
    std::uint32_t sample_rate = 0;
};

constexpr std::size_t kFrameSize = 4096;
constexpr std::size_t kFrameHop = 2048;
constexpr std::size_t kSpectrumBins = kFrameSize / 2 + 1;  // bins 0..2048
constexpr std::size_t kBandCount = 16;

// Bands whose maximum magnitude falls below this fraction of the frame's
// spectral peak are treated as silent.
constexpr double kSilenceFloorRatio = 1e-4;

// Per-frame code: the argmax bin index of each of the 16 geometric bands,
// every index in [1, 2048].
struct SpectralFrame {
    std::array<std::uint16_t, kBandCount> subscripts{};
};

// 64-char lowercase hex SHA-256 digest of all frame codes.
struct Fingerprint {
    std::string value;

    auto operator<=>(const Fingerprint&) const = default;
};

// Inclusive [lo, hi] bin ranges of the 16 geometric bands over bins 1..2048.
struct BandRange {
    int lo;
    int hi;
};
const std::array<BandRange, kBandCount>& band_ranges();

// Magnitudes of the DFT of the Hann-windowed frame at bins 0..2048.
// The frame must hold exactly 4096 samples; callers zero-pad.
std::vector<double> dft_magnitudes(std::span<const double> frame);

// Argmax bin per geometric band, ties broken toward the lowest index.
// Expects the 2049 magnitudes produced by dft_magnitudes.
SpectralFrame extract_subscripts(std::span<const double> magnitudes);

Fingerprint music_fingerprint(const PcmAudio& audio);

// Parses a RIFF/WAVE container holding 16-bit integer PCM, 1 or 2 channels.
// Stereo is downmixed by per-sample channel mean, rounded toward zero.
PcmAudio read_wav(std::span<const std::uint8_t> bytes);

}  // namespace tunechain
