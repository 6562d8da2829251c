#pragma once

// The 15 per-segment statistics: 10 time-domain (population moments, 1/L)
// and 5 frequency-domain over the one-sided DFT magnitude set
// {|X(m)|, m = 0..floor(L/2)}.
//
// Degenerate conventions (so no NaN ever leaks into a prompt): skewness and
// kurtosis are 0 when the standard deviation is 0; crest/shape/impulse
// factors are 0 when mean|x| is 0.

#include <array>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "fdkit/error.hpp"
#include "fdkit/fft.hpp"
#include "fdkit/preprocess.hpp"
#include "fdkit/util.hpp"

namespace fdkit {

struct TimeFeatures {
    double mean = 0;
    double rms = 0;
    double std_dev = 0;
    double crest_factor = 0;
    double skewness = 0;
    double shape_factor = 0;
    double kurtosis = 0;
    double peak_to_peak = 0;
    double energy_factor = 0;
    double impulse_factor = 0;
};

struct FreqFeatures {
    double peak_frequency = 0;     // Hz (argmax bin * fs / L)
    double p2p_frequency = 0;      // max|X| - min|X|, a magnitude range
    double spectral_kurtosis = 0;
    double spectral_bandwidth = 0; // Hz
    double spectral_skewness = 0;
    std::size_t peak_bin = 0;      // raw argmax index, kept alongside the Hz value
};

struct FeatureVector {
    TimeFeatures time;
    FreqFeatures freq;

    static constexpr std::array<const char*, 15> kNames = {
        "mean",           "rms",
        "std",            "crest_factor",
        "skewness",       "shape_factor",
        "kurtosis",       "peak_to_peak",
        "energy_factor",  "impulse_factor",
        "peak_frequency", "p2p_frequency",
        "spectral_kurtosis", "spectral_bandwidth", "spectral_skewness"};

    std::array<double, 15> values() const {
        return {time.mean,          time.rms,           time.std_dev,
                time.crest_factor,  time.skewness,      time.shape_factor,
                time.kurtosis,      time.peak_to_peak,  time.energy_factor,
                time.impulse_factor, freq.peak_frequency, freq.p2p_frequency,
                freq.spectral_kurtosis, freq.spectral_bandwidth, freq.spectral_skewness};
    }
};

inline TimeFeatures time_features(const Segment& seg) {
    const std::size_t len = seg.length();
    if (len < 2) fail("SegmentTooShort", "time features need at least 2 samples");
    const double inv_len = 1.0 / static_cast<double>(len);

    double sum = 0, sum_sq = 0, sum_abs = 0, max_abs = 0;
    double max_v = seg.samples[0], min_v = seg.samples[0];
    for (double v : seg.samples) {
        sum += v;
        sum_sq += v * v;
        sum_abs += std::fabs(v);
        max_abs = std::max(max_abs, std::fabs(v));
        max_v = std::max(max_v, v);
        min_v = std::min(min_v, v);
    }
    const double mean = sum * inv_len;
    const double mean_abs = sum_abs * inv_len;

    double m2 = 0, m3 = 0, m4 = 0;
    for (double v : seg.samples) {
        const double d = v - mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    m2 *= inv_len;
    m3 *= inv_len;
    m4 *= inv_len;
    const double sd = std::sqrt(m2);

    TimeFeatures f;
    f.mean = mean;
    f.rms = std::sqrt(sum_sq * inv_len);
    f.std_dev = sd;
    f.peak_to_peak = max_v - min_v;
    f.skewness = sd > 0.0 ? m3 / (sd * sd * sd) : 0.0;
    f.kurtosis = sd > 0.0 ? m4 / (m2 * m2) : 0.0;
    f.crest_factor = f.rms > 0.0 ? max_abs / f.rms : 0.0;
    f.shape_factor = mean_abs > 0.0 ? f.rms / mean_abs : 0.0;
    f.impulse_factor = mean_abs > 0.0 ? max_abs / mean_abs : 0.0;
    f.energy_factor = sum_abs > 0.0 ? sum_sq / (sum_abs * sum_abs) : 0.0;
    return f;
}

inline FreqFeatures freq_features(const Segment& seg, double sampling_rate_hz) {
    const std::size_t len = seg.length();
    if (len < 2) fail("SegmentTooShort", "frequency features need at least 2 samples");
    if (!(sampling_rate_hz > 0.0)) fail("InvalidParameter", "sampling rate must be positive");

    std::vector<std::complex<double>> spectrum = fft_real(seg.samples);
    const std::size_t half = len / 2;  // one-sided set is m = 0..half
    std::vector<double> mag(half + 1);
    for (std::size_t m = 0; m <= half; ++m) mag[m] = std::abs(spectrum[m]);

    std::size_t peak_bin = 0;
    double max_mag = mag[0], min_mag = mag[0], sum_mag = 0, weighted_bin = 0;
    for (std::size_t m = 0; m <= half; ++m) {
        if (mag[m] > max_mag) {
            max_mag = mag[m];
            peak_bin = m;
        }
        min_mag = std::min(min_mag, mag[m]);
        sum_mag += mag[m];
        weighted_bin += static_cast<double>(m) * mag[m];
    }

    const double count = static_cast<double>(half + 1);
    const double mu = sum_mag / count;
    double c2 = 0, c3 = 0, c4 = 0;
    for (std::size_t m = 0; m <= half; ++m) {
        const double d = mag[m] - mu;
        c2 += d * d;
        c3 += d * d * d;
        c4 += d * d * d * d;
    }
    c2 /= count;
    c3 /= count;
    c4 /= count;
    const double sigma = std::sqrt(c2);

    FreqFeatures f;
    f.peak_bin = peak_bin;
    f.peak_frequency = static_cast<double>(peak_bin) * sampling_rate_hz / static_cast<double>(len);
    f.p2p_frequency = max_mag - min_mag;
    f.spectral_kurtosis = sigma > 0.0 ? c4 / (c2 * c2) : 0.0;
    f.spectral_skewness = sigma > 0.0 ? c3 / (sigma * sigma * sigma) : 0.0;

    if (sum_mag > 0.0) {
        const double mu_f = weighted_bin / sum_mag;  // magnitude-weighted mean bin
        double var_bin = 0;
        for (std::size_t m = 0; m <= half; ++m) {
            const double d = static_cast<double>(m) - mu_f;
            var_bin += d * d * mag[m];
        }
        f.spectral_bandwidth = std::sqrt(var_bin / sum_mag) * sampling_rate_hz / static_cast<double>(len);
    } else {
        f.spectral_bandwidth = 0.0;
    }
    return f;
}

inline FeatureVector compute_features(const Segment& seg, double sampling_rate_hz) {
    FeatureVector fv;
    fv.time = time_features(seg);
    fv.freq = freq_features(seg, sampling_rate_hz);
    return fv;
}

// Header row of the 15 canonical names plus one row per segment, in input
// order.
struct FeatureTable {
    std::array<const char*, 15> header = FeatureVector::kNames;
    std::vector<std::array<double, 15>> rows;
};

inline FeatureTable feature_table(const std::vector<Segment>& segments, double sampling_rate_hz) {
    if (segments.empty()) fail("EmptyInput", "feature_table of no segments");
    FeatureTable t;
    t.rows.reserve(segments.size());
    for (const Segment& s : segments) t.rows.push_back(compute_features(s, sampling_rate_hz).values());
    return t;
}

// CSV: UTF-8, ',' delimiter, '.' decimal point, 12 significant digits.
inline std::string feature_table_to_csv(const FeatureTable& t) {
    std::string out;
    for (std::size_t i = 0; i < t.header.size(); ++i) {
        if (i) out.push_back(',');
        out += t.header[i];
    }
    out.push_back('\n');
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out.push_back(',');
            out += format_sig(row[i], 12);
        }
        out.push_back('\n');
    }
    return out;
}

}  // namespace fdkit
