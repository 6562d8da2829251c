#pragma once

// Independent reference implementation of the 15 statistics, written as
// separate single-purpose passes over the data (no shared accumulators with
// the production code). Frequency-domain values are built on the naive DFT
// oracle, not the fast transform.

#include <algorithm>
#include <cmath>
#include <vector>

#include "naive_dft.hpp"

namespace oracle {

inline double o_mean(const std::vector<double>& x) {
    double s = 0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

inline double o_rms(const std::vector<double>& x) {
    double s = 0;
    for (double v : x) s += v * v;
    return std::sqrt(s / static_cast<double>(x.size()));
}

inline double o_std(const std::vector<double>& x) {
    const double mu = o_mean(x);
    double s = 0;
    for (double v : x) s += (v - mu) * (v - mu);
    return std::sqrt(s / static_cast<double>(x.size()));
}

inline double o_max_abs(const std::vector<double>& x) {
    double m = 0;
    for (double v : x) m = std::max(m, std::fabs(v));
    return m;
}

inline double o_mean_abs(const std::vector<double>& x) {
    double s = 0;
    for (double v : x) s += std::fabs(v);
    return s / static_cast<double>(x.size());
}

inline double o_crest(const std::vector<double>& x) {
    const double r = o_rms(x);
    return r > 0 ? o_max_abs(x) / r : 0.0;
}

inline double o_skew(const std::vector<double>& x) {
    const double mu = o_mean(x), sd = o_std(x);
    if (sd == 0) return 0.0;
    double s = 0;
    for (double v : x) s += (v - mu) * (v - mu) * (v - mu);
    return (s / static_cast<double>(x.size())) / (sd * sd * sd);
}

inline double o_shape(const std::vector<double>& x) {
    const double ma = o_mean_abs(x);
    return ma > 0 ? o_rms(x) / ma : 0.0;
}

inline double o_kurt(const std::vector<double>& x) {
    const double mu = o_mean(x), sd = o_std(x);
    if (sd == 0) return 0.0;
    double s = 0;
    for (double v : x) s += (v - mu) * (v - mu) * (v - mu) * (v - mu);
    return (s / static_cast<double>(x.size())) / (sd * sd * sd * sd);
}

inline double o_p2p(const std::vector<double>& x) {
    return *std::max_element(x.begin(), x.end()) - *std::min_element(x.begin(), x.end());
}

inline double o_energy(const std::vector<double>& x) {
    double sq = 0, ab = 0;
    for (double v : x) {
        sq += v * v;
        ab += std::fabs(v);
    }
    return ab > 0 ? sq / (ab * ab) : 0.0;
}

inline double o_impulse(const std::vector<double>& x) {
    const double ma = o_mean_abs(x);
    return ma > 0 ? o_max_abs(x) / ma : 0.0;
}

struct FreqOracle {
    double peak_frequency;
    double p2p_frequency;
    double spectral_kurtosis;
    double spectral_bandwidth;
    double spectral_skewness;
};

inline FreqOracle o_freq(const std::vector<double>& x, double fs) {
    const auto spectrum = naive_dft(x);
    const std::size_t half = x.size() / 2;
    std::vector<double> mag;
    for (std::size_t m = 0; m <= half; ++m) mag.push_back(std::abs(spectrum[m]));

    std::size_t argmax = 0;
    for (std::size_t m = 1; m < mag.size(); ++m)
        if (mag[m] > mag[argmax]) argmax = m;

    const double mu = o_mean(mag);
    const double sd = o_std(mag);
    double c3 = 0, c4 = 0;
    for (double v : mag) {
        c3 += (v - mu) * (v - mu) * (v - mu);
        c4 += (v - mu) * (v - mu) * (v - mu) * (v - mu);
    }
    c3 /= static_cast<double>(mag.size());
    c4 /= static_cast<double>(mag.size());

    double sum = 0, wsum = 0;
    for (std::size_t m = 0; m < mag.size(); ++m) {
        sum += mag[m];
        wsum += static_cast<double>(m) * mag[m];
    }
    double bw = 0;
    if (sum > 0) {
        const double mu_f = wsum / sum;
        double acc = 0;
        for (std::size_t m = 0; m < mag.size(); ++m)
            acc += (static_cast<double>(m) - mu_f) * (static_cast<double>(m) - mu_f) * mag[m];
        bw = std::sqrt(acc / sum) * fs / static_cast<double>(x.size());
    }

    FreqOracle f;
    f.peak_frequency = static_cast<double>(argmax) * fs / static_cast<double>(x.size());
    f.p2p_frequency = *std::max_element(mag.begin(), mag.end()) -
                      *std::min_element(mag.begin(), mag.end());
    f.spectral_kurtosis = sd > 0 ? c4 / (sd * sd * sd * sd) : 0.0;
    f.spectral_skewness = sd > 0 ? c3 / (sd * sd * sd) : 0.0;
    f.spectral_bandwidth = bw;
    return f;
}

}  // namespace oracle
