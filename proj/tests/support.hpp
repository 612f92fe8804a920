#pragma once

// Shared test helpers: WAV builders, independent oracles, temp dirs and a
// subprocess runner for the CLI binary.

#include <sys/wait.h>

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "tunechain/bytes.hpp"

namespace testsupport {

// --- WAV construction ----------------------------------------------------

inline void push_u32_le(tunechain::Bytes& out, std::uint32_t v) {
    out.push_back(v & 0xff);
    out.push_back(v >> 8 & 0xff);
    out.push_back(v >> 16 & 0xff);
    out.push_back(v >> 24 & 0xff);
}

inline void push_u16_le(tunechain::Bytes& out, std::uint16_t v) {
    out.push_back(v & 0xff);
    out.push_back(v >> 8 & 0xff);
}

// Interleaved 16-bit samples -> RIFF/WAVE bytes.
inline tunechain::Bytes wav_bytes(const std::vector<std::int16_t>& interleaved,
                                  std::uint16_t channels, std::uint32_t rate) {
    tunechain::Bytes out;
    std::uint32_t data_size = static_cast<std::uint32_t>(interleaved.size() * 2);
    out.insert(out.end(), {'R', 'I', 'F', 'F'});
    push_u32_le(out, 36 + data_size);
    out.insert(out.end(), {'W', 'A', 'V', 'E'});
    out.insert(out.end(), {'f', 'm', 't', ' '});
    push_u32_le(out, 16);
    push_u16_le(out, 1);  // PCM
    push_u16_le(out, channels);
    push_u32_le(out, rate);
    push_u32_le(out, rate * channels * 2);
    push_u16_le(out, channels * 2);
    push_u16_le(out, 16);
    out.insert(out.end(), {'d', 'a', 't', 'a'});
    push_u32_le(out, data_size);
    for (std::int16_t s : interleaved) push_u16_le(out, static_cast<std::uint16_t>(s));
    return out;
}

inline std::vector<std::int16_t> tone_samples(double freq, double amplitude, std::uint32_t rate,
                                              double seconds) {
    std::vector<std::int16_t> samples;
    auto count = static_cast<std::size_t>(rate * seconds);
    samples.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        double x = amplitude * std::sin(2.0 * std::numbers::pi * freq * i / rate);
        samples.push_back(static_cast<std::int16_t>(std::lround(x * 32767.0)));
    }
    return samples;
}

inline tunechain::Bytes tone_wav(double freq, double amplitude = 0.5, std::uint32_t rate = 44100,
                                 double seconds = 0.25) {
    return wav_bytes(tone_samples(freq, amplitude, rate, seconds), 1, rate);
}

// --- naive O(n^2) DFT oracle ----------------------------------------------

// Direct-summation DFT of the Hann-windowed 4096-sample frame, magnitudes at
// bins 0..2048. Twiddles come from a precomputed table indexed k*n mod N;
// no FFT structure is shared with the implementation.
inline std::vector<double> naive_dft_magnitudes(const std::vector<double>& frame) {
    constexpr std::size_t N = 4096;
    static std::vector<double> cos_table, sin_table;
    if (cos_table.empty()) {
        cos_table.resize(N);
        sin_table.resize(N);
        for (std::size_t j = 0; j < N; ++j) {
            cos_table[j] = std::cos(2.0 * std::numbers::pi * j / N);
            sin_table[j] = std::sin(2.0 * std::numbers::pi * j / N);
        }
    }
    std::vector<double> windowed(N);
    for (std::size_t n = 0; n < N; ++n)
        windowed[n] =
            frame[n] * 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * n / double(N - 1)));

    std::vector<double> magnitudes(N / 2 + 1);
    for (std::size_t k = 0; k <= N / 2; ++k) {
        double re = 0.0, im = 0.0;
        std::size_t idx = 0;
        for (std::size_t n = 0; n < N; ++n) {
            re += windowed[n] * cos_table[idx];
            im -= windowed[n] * sin_table[idx];
            idx += k;
            if (idx >= N) idx -= N;
        }
        magnitudes[k] = std::hypot(re, im);
    }
    return magnitudes;
}

// max_k |a_k - b_k| / max_k |b_k|
inline double relative_error(const std::vector<double>& got, const std::vector<double>& expected) {
    double max_diff = 0.0, max_mag = 0.0;
    for (std::size_t k = 0; k < expected.size(); ++k) {
        max_diff = std::max(max_diff, std::fabs(got[k] - expected[k]));
        max_mag = std::max(max_mag, std::fabs(expected[k]));
    }
    return max_mag == 0.0 ? max_diff : max_diff / max_mag;
}

// --- independent SHA-256 oracle -------------------------------------------

// Reference SHA-256 written against FIPS 180-4 with a fully materialized
// padded message and a rolling 16-word schedule; shares no code with the
// library implementation.
inline std::array<std::uint8_t, 32> ref_sha256(const std::vector<std::uint8_t>& message) {
    auto rotr = [](std::uint32_t x, unsigned n) { return x >> n | x << (32 - n); };
    static const std::uint32_t K[64] = {
        0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1, 0x923f82a4,
        0xab1c5ed5, 0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3, 0x72be5d74, 0x80deb1fe,
        0x9bdc06a7, 0xc19bf174, 0xe49b69c1, 0xefbe4786, 0x0fc19dc6, 0x240ca1cc, 0x2de92c6f,
        0x4a7484aa, 0x5cb0a9dc, 0x76f988da, 0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7,
        0xc6e00bf3, 0xd5a79147, 0x06ca6351, 0x14292967, 0x27b70a85, 0x2e1b2138, 0x4d2c6dfc,
        0x53380d13, 0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85, 0xa2bfe8a1, 0xa81a664b,
        0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070, 0x19a4c116,
        0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a, 0x5b9cca4f, 0x682e6ff3,
        0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208, 0x90befffa, 0xa4506ceb, 0xbef9a3f7,
        0xc67178f2};

    std::vector<std::uint8_t> padded = message;
    std::uint64_t bits = std::uint64_t(message.size()) * 8;
    padded.push_back(0x80);
    while (padded.size() % 64 != 56) padded.push_back(0);
    for (int i = 7; i >= 0; --i) padded.push_back(std::uint8_t(bits >> (8 * i)));

    std::uint32_t h[8] = {0x6a09e667, 0xbb67ae85, 0x3c6ef372, 0xa54ff53a,
                          0x510e527f, 0x9b05688c, 0x1f83d9ab, 0x5be0cd19};
    for (std::size_t block = 0; block < padded.size(); block += 64) {
        std::uint32_t w[16];
        for (int t = 0; t < 16; ++t)
            w[t] = std::uint32_t(padded[block + 4 * t]) << 24 |
                   std::uint32_t(padded[block + 4 * t + 1]) << 16 |
                   std::uint32_t(padded[block + 4 * t + 2]) << 8 |
                   std::uint32_t(padded[block + 4 * t + 3]);
        std::uint32_t a = h[0], b = h[1], c = h[2], d = h[3];
        std::uint32_t e = h[4], f = h[5], g = h[6], hh = h[7];
        for (int t = 0; t < 64; ++t) {
            std::uint32_t wt;
            if (t < 16) {
                wt = w[t];
            } else {
                std::uint32_t w15 = w[(t - 15) & 15], w2 = w[(t - 2) & 15];
                std::uint32_t s0 = rotr(w15, 7) ^ rotr(w15, 18) ^ (w15 >> 3);
                std::uint32_t s1 = rotr(w2, 17) ^ rotr(w2, 19) ^ (w2 >> 10);
                wt = w[t & 15] = w[t & 15] + s0 + w[(t - 7) & 15] + s1;
            }
            std::uint32_t S1 = rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25);
            std::uint32_t ch = (e & f) ^ (~e & g);
            std::uint32_t t1 = hh + S1 + ch + K[t] + wt;
            std::uint32_t S0 = rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22);
            std::uint32_t maj = (a & b) ^ (a & c) ^ (b & c);
            std::uint32_t t2 = S0 + maj;
            hh = g;
            g = f;
            f = e;
            e = d + t1;
            d = c;
            c = b;
            b = a;
            a = t1 + t2;
        }
        h[0] += a;
        h[1] += b;
        h[2] += c;
        h[3] += d;
        h[4] += e;
        h[5] += f;
        h[6] += g;
        h[7] += hh;
    }

    std::array<std::uint8_t, 32> digest{};
    for (int i = 0; i < 8; ++i) {
        digest[4 * i] = std::uint8_t(h[i] >> 24);
        digest[4 * i + 1] = std::uint8_t(h[i] >> 16);
        digest[4 * i + 2] = std::uint8_t(h[i] >> 8);
        digest[4 * i + 3] = std::uint8_t(h[i]);
    }
    return digest;
}

inline std::array<std::uint8_t, 32> ref_sha256(const std::string& text) {
    return ref_sha256(std::vector<std::uint8_t>(text.begin(), text.end()));
}

// --- filesystem helpers ----------------------------------------------------

class TempDir {
public:
    explicit TempDir(const std::string& tag = "tunechain-test") {
        auto base = std::filesystem::temp_directory_path();
        std::string tmpl = (base / (tag + ".XXXXXX")).string();
        std::vector<char> buf(tmpl.begin(), tmpl.end());
        buf.push_back('\0');
        if (!mkdtemp(buf.data())) throw std::runtime_error("mkdtemp failed");
        path_ = buf.data();
    }
    ~TempDir() {
        std::error_code ignored;
        std::filesystem::remove_all(path_, ignored);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& leaf) const { return path_ / leaf; }

private:
    std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& path, const tunechain::Bytes& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

// --- CLI subprocess runner --------------------------------------------------

struct RunResult {
    int exit_code = -1;
    std::string output;
};

inline std::string cli_binary() {
    const char* env = std::getenv("TUNECHAIN_BIN");
    return env ? env : "tunechain";
}

inline std::string shell_quote(const std::string& arg) {
    std::string quoted = "'";
    for (char c : arg) {
        if (c == '\'')
            quoted += "'\\''";
        else
            quoted += c;
    }
    return quoted + "'";
}

// Runs the CLI with the given arguments, capturing stdout (and optionally
// stderr) and the exit code.
inline RunResult run_cli(const std::vector<std::string>& args, bool merge_stderr = true) {
    std::string cmd = shell_quote(cli_binary());
    for (const auto& arg : args) cmd += " " + shell_quote(arg);
    if (merge_stderr)
        cmd += " 2>&1";
    else
        cmd += " 2>/dev/null";

    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) throw std::runtime_error("popen failed");
    RunResult result;
    char buf[4096];
    std::size_t got;
    while ((got = fread(buf, 1, sizeof(buf), pipe)) > 0) result.output.append(buf, got);
    int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

}  // namespace testsupport
