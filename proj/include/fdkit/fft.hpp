#pragma once

// Iterative radix-2 FFT with a Bluestein chirp-z fallback, so the transform
// is O(L log L) for every segment length, not just powers of two.

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "fdkit/error.hpp"

namespace fdkit {

namespace detail {

constexpr double kTau = 6.283185307179586476925286766559;

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

// In-place radix-2 Cooley-Tukey. n must be a power of two.
inline void fft_pow2(std::vector<std::complex<double>>& a, bool inverse) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    std::vector<std::complex<double>> twiddle;
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = (inverse ? kTau : -kTau) / static_cast<double>(len);
        twiddle.resize(len / 2);
        for (std::size_t k = 0; k < len / 2; ++k)
            twiddle[k] = std::polar(1.0, ang * static_cast<double>(k));
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t k = 0; k < len / 2; ++k) {
                std::complex<double> u = a[i + k];
                std::complex<double> v = a[i + k + len / 2] * twiddle[k];
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
            }
        }
    }
    if (inverse) {
        const double inv = 1.0 / static_cast<double>(n);
        for (auto& x : a) x *= inv;
    }
}

// Bluestein chirp-z transform for arbitrary n, built on the radix-2 kernel.
inline std::vector<std::complex<double>> fft_bluestein(const std::vector<std::complex<double>>& x) {
    const std::size_t n = x.size();
    const std::size_t m = next_pow2(2 * n + 1);

    // chirp w[k] = exp(-i*pi*k^2/n); k^2 taken mod 2n to keep angles small
    std::vector<std::complex<double>> w(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::uint64_t kk = (static_cast<std::uint64_t>(k) * k) % (2 * n);
        w[k] = std::polar(1.0, -kTau / 2.0 * static_cast<double>(kk) / static_cast<double>(n));
    }

    std::vector<std::complex<double>> a(m), b(m);
    for (std::size_t k = 0; k < n; ++k) a[k] = x[k] * w[k];
    b[0] = std::conj(w[0]);
    for (std::size_t k = 1; k < n; ++k) b[k] = b[m - k] = std::conj(w[k]);

    fft_pow2(a, false);
    fft_pow2(b, false);
    for (std::size_t k = 0; k < m; ++k) a[k] *= b[k];
    fft_pow2(a, true);

    std::vector<std::complex<double>> out(n);
    for (std::size_t k = 0; k < n; ++k) out[k] = a[k] * w[k];
    return out;
}

}  // namespace detail

// Forward DFT of a complex input, all bins.
inline std::vector<std::complex<double>> fft(std::vector<std::complex<double>> x) {
    if (x.empty()) fail("InvalidParameter", "fft of an empty sequence");
    if (detail::is_pow2(x.size())) {
        detail::fft_pow2(x, false);
        return x;
    }
    return detail::fft_bluestein(x);
}

// Forward DFT of a real input, all L bins.
inline std::vector<std::complex<double>> fft_real(std::span<const double> x) {
    std::vector<std::complex<double>> c(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) c[i] = std::complex<double>(x[i], 0.0);
    return fft(std::move(c));
}

}  // namespace fdkit
