#include "tunechain/fingerprint.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "tunechain/errors.hpp"
#include "tunechain/sha256.hpp"

namespace tunechain {

namespace {

// In-place iterative radix-2 FFT; size must be a power of two.
void fft(std::vector<std::complex<double>>& a) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        double angle = -2.0 * std::numbers::pi / static_cast<double>(len);
        std::complex<double> wlen(std::cos(angle), std::sin(angle));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                std::complex<double> u = a[i + k];
                std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

std::array<BandRange, kBandCount> compute_band_ranges() {
    // Geometric band edges over bins 1..2048: edge k = 2048^(k/16).
    std::array<int, kBandCount + 1> starts{};
    for (std::size_t k = 0; k <= kBandCount; ++k) {
        double edge = std::pow(2048.0, static_cast<double>(k) / kBandCount);
        starts[k] = static_cast<int>(std::llround(edge));
    }
    std::array<BandRange, kBandCount> ranges{};
    for (std::size_t k = 0; k < kBandCount; ++k) {
        ranges[k].lo = starts[k];
        ranges[k].hi = (k + 1 == kBandCount) ? 2048 : starts[k + 1] - 1;
    }
    return ranges;
}

}  // namespace

const std::array<BandRange, kBandCount>& band_ranges() {
    static const std::array<BandRange, kBandCount> ranges = compute_band_ranges();
    return ranges;
}

std::vector<double> dft_magnitudes(std::span<const double> frame) {
    if (frame.size() != kFrameSize)
        throw InvalidInput("dft_magnitudes: frame must hold exactly 4096 samples");

    std::vector<std::complex<double>> buf(kFrameSize);
    for (std::size_t n = 0; n < kFrameSize; ++n) {
        double hann = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(n) /
                                            static_cast<double>(kFrameSize - 1)));
        buf[n] = frame[n] * hann;
    }
    fft(buf);

    std::vector<double> magnitudes(kSpectrumBins);
    for (std::size_t k = 0; k < kSpectrumBins; ++k) magnitudes[k] = std::abs(buf[k]);
    return magnitudes;
}

SpectralFrame extract_subscripts(std::span<const double> magnitudes) {
    if (magnitudes.size() != kSpectrumBins)
        throw InvalidInput("extract_subscripts: expected 2049 magnitudes");

    double peak = 0.0;
    for (std::size_t k = 1; k < kSpectrumBins; ++k) peak = std::max(peak, magnitudes[k]);

    SpectralFrame frame;
    const auto& ranges = band_ranges();
    for (std::size_t band = 0; band < kBandCount; ++band) {
        int best = ranges[band].lo;
        for (int bin = ranges[band].lo + 1; bin <= ranges[band].hi; ++bin) {
            if (magnitudes[static_cast<std::size_t>(bin)] >
                magnitudes[static_cast<std::size_t>(best)])
                best = bin;
        }
        // Bands more than 80 dB below the frame peak carry no signal, only
        // quantization noise; they read as silent and emit the band's lowest
        // bin, the same code the tie rule gives an all-zero band.
        if (magnitudes[static_cast<std::size_t>(best)] < kSilenceFloorRatio * peak)
            best = ranges[band].lo;
        frame.subscripts[band] = static_cast<std::uint16_t>(best);
    }
    return frame;
}

Fingerprint music_fingerprint(const PcmAudio& audio) {
    if (audio.samples.empty()) throw InvalidInput("music_fingerprint: empty audio");

    const std::size_t total = audio.samples.size();
    std::size_t frame_count = 1;
    if (total > kFrameSize) frame_count = 1 + (total - kFrameSize + kFrameHop - 1) / kFrameHop;

    Sha256 digest;
    std::vector<double> frame(kFrameSize);
    for (std::size_t f = 0; f < frame_count; ++f) {
        std::size_t start = f * kFrameHop;
        for (std::size_t n = 0; n < kFrameSize; ++n) {
            std::size_t idx = start + n;
            frame[n] = idx < total ? static_cast<double>(audio.samples[idx]) : 0.0;
        }
        SpectralFrame spectral = extract_subscripts(dft_magnitudes(frame));

        std::uint8_t code[kBandCount * 2];
        for (std::size_t band = 0; band < kBandCount; ++band) {
            code[band * 2] = static_cast<std::uint8_t>(spectral.subscripts[band] >> 8);
            code[band * 2 + 1] = static_cast<std::uint8_t>(spectral.subscripts[band] & 0xff);
        }
        digest.update(std::span<const std::uint8_t>(code, sizeof(code)));
    }
    return Fingerprint{digest.finish().hex()};
}

}  // namespace tunechain
