#pragma once

// Segmentation, normalized FFT magnitudes and the token-friendly string
// encoding of spectra: sign handling, decimal truncation to D places, and
// separator-joined integer tokens with "NaN" for missing values.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "fdkit/error.hpp"
#include "fdkit/fft.hpp"
#include "fdkit/types.hpp"
#include "fdkit/util.hpp"

namespace fdkit {

constexpr std::size_t kDefaultSegmentLength = 512;
constexpr int kDefaultDecimals = 3;
constexpr int kMaxDecimals = 12;
constexpr char kTokenSeparator = ',';
constexpr const char* kMissingToken = "NaN";

struct Segment {
    std::vector<double> samples;
    std::string parent;       // source_id of the originating signal
    std::size_t start_index = 0;

    std::size_t length() const { return samples.size(); }
};

enum class SegmentMode { ContiguousNonOverlap, RandomStart };

// Cut K windows of length L out of a signal. Contiguous mode tiles from the
// start; RandomStart draws offsets uniformly from [0, N-L] with a seeded
// generator (overlap permitted). Deterministic given the seed.
inline std::vector<Segment> segment(const TimeSeriesSignal& signal, std::size_t length,
                                    std::size_t count, SegmentMode mode, std::uint64_t seed) {
    const std::size_t n = signal.samples.size();
    if (length == 0) fail("InvalidParameter", "segment length must be positive");
    if (count == 0) fail("InvalidParameter", "segment count must be positive");
    if (n < length)
        fail("SignalTooShort", signal.source_id + " has " + std::to_string(n) +
                                   " samples, need at least " + std::to_string(length));

    std::vector<std::size_t> starts;
    starts.reserve(count);
    if (mode == SegmentMode::ContiguousNonOverlap) {
        if (count > n / length)
            fail("TooManySegments", "requested " + std::to_string(count) +
                                        " non-overlapping segments, signal fits " +
                                        std::to_string(n / length));
        for (std::size_t k = 0; k < count; ++k) starts.push_back(k * length);
    } else {
        std::mt19937_64 rng(seed);
        for (std::size_t k = 0; k < count; ++k)
            starts.push_back(static_cast<std::size_t>(uniform_below(rng, n - length + 1)));
    }

    std::vector<Segment> out;
    out.reserve(count);
    for (std::size_t s : starts) {
        Segment seg;
        seg.samples.assign(signal.samples.begin() + static_cast<std::ptrdiff_t>(s),
                           signal.samples.begin() + static_cast<std::ptrdiff_t>(s + length));
        seg.parent = signal.source_id;
        seg.start_index = s;
        out.push_back(std::move(seg));
    }
    return out;
}

// L non-negative magnitudes |X[m]|/L, m = 0..L-1.
struct SpectrumVector {
    std::vector<double> values;

    std::size_t length() const { return values.size(); }
};

inline SpectrumVector fft_magnitude(const Segment& seg) {
    for (double v : seg.samples)
        if (!std::isfinite(v)) fail("NonFiniteInput", "segment of " + seg.parent + " contains a non-finite sample");
    const double inv_len = 1.0 / static_cast<double>(seg.length());
    std::vector<std::complex<double>> spectrum = fft_real(seg.samples);
    SpectrumVector out;
    out.values.resize(spectrum.size());
    for (std::size_t m = 0; m < spectrum.size(); ++m)
        out.values[m] = std::abs(spectrum[m]) * inv_len;
    return out;
}

struct SignedValue {
    double magnitude;  // |y|
    int sign;          // +1 for y >= 0, -1 otherwise
};

inline SignedValue handle_sign(double y) {
    if (!std::isfinite(y)) fail("NonFiniteInput", "handle_sign of a non-finite value");
    return y < 0.0 ? SignedValue{-y, -1} : SignedValue{y, +1};
}

namespace detail {

constexpr double kPow10[kMaxDecimals + 1] = {1e0, 1e1, 1e2,  1e3,  1e4,  1e5, 1e6,
                                             1e7, 1e8, 1e9, 1e10, 1e11, 1e12};

}  // namespace detail

// Truncate y to D decimals and return the integer floor(y*10^D). The guard
// keeps exact decimal inputs from being perturbed by their binary
// representation (0.1 at D=3 must give 100, not 99); it grows with the
// scaled magnitude because representation error does too.
inline long long quantize_value(double y, int decimals) {
    double scaled = y * detail::kPow10[decimals];
    double guard = 1e-12 * std::max(1.0, std::fabs(scaled));
    return static_cast<long long>(std::floor(scaled + guard));
}

// One slot per input; std::nullopt marks a missing (non-finite) value.
inline std::vector<std::optional<long long>> quantize(std::span<const double> values, int decimals) {
    if (decimals < 0 || decimals > kMaxDecimals)
        fail("InvalidParameter", "decimals must be in 0..12");
    std::vector<std::optional<long long>> out;
    out.reserve(values.size());
    for (double y : values) {
        if (!std::isfinite(y)) out.push_back(std::nullopt);
        else out.push_back(quantize_value(y, decimals));
    }
    return out;
}

struct EncodedSample {
    std::string text;   // separator-joined integer tokens, "NaN" for missing
    int decimals = kDefaultDecimals;
    std::size_t token_count = 0;
};

struct EncodeOptions {
    int decimals = kDefaultDecimals;
    // Encode only bins 0..L/2 (token-budget experiments); the default is the
    // full two-sided spectrum.
    bool one_sided = false;
};

inline EncodedSample encode(const SpectrumVector& spectrum, const EncodeOptions& opts = {}) {
    std::span<const double> values(spectrum.values);
    if (opts.one_sided) values = values.subspan(0, spectrum.length() / 2 + 1);
    std::vector<std::optional<long long>> q = quantize(values, opts.decimals);

    EncodedSample out;
    out.decimals = opts.decimals;
    out.token_count = q.size();
    out.text.reserve(q.size() * 4);
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (i) out.text.push_back(kTokenSeparator);
        if (q[i]) out.text += std::to_string(*q[i]);
        else out.text += kMissingToken;
    }
    return out;
}

inline EncodedSample encode(const SpectrumVector& spectrum, int decimals) {
    return encode(spectrum, EncodeOptions{decimals, false});
}

// Inverse of the string encoding: token -> q/10^D, "NaN" -> quiet NaN.
inline std::vector<double> decode(const std::string& text, int decimals) {
    if (decimals < 0 || decimals > kMaxDecimals)
        fail("InvalidParameter", "decimals must be in 0..12");
    std::vector<double> out;
    std::size_t pos = 0;
    const double scale = detail::kPow10[decimals];
    while (pos <= text.size()) {
        std::size_t next = text.find(kTokenSeparator, pos);
        std::string token = text.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
        if (token == kMissingToken) {
            out.push_back(std::numeric_limits<double>::quiet_NaN());
        } else {
            errno = 0;
            char* end = nullptr;
            long long q = std::strtoll(token.c_str(), &end, 10);
            if (end == token.c_str() || *end != '\0' || errno == ERANGE)
                fail("MalformedToken", "'" + token + "' is not an integer token");
            out.push_back(static_cast<double>(q) / scale);
        }
        if (next == std::string::npos) break;
        pos = next + 1;
    }
    return out;
}

}  // namespace fdkit
