#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "stimrec/errors.hpp"
#include "stimrec/signal.hpp"

namespace stimrec {

struct WindowGeometry {
    std::size_t window_len = 64;
    std::size_t hop = 56;  // window_len - overlap; default overlap 8

    std::size_t overlap() const { return window_len - hop; }

    void validate() const {
        if (window_len == 0 || hop == 0 || hop > window_len)
            throw data_error("window geometry: need 0 < hop <= window_len");
    }
};

struct BandSpec {
    std::string name;
    double low_hz = 0.0;
    double high_hz = 0.0;  // inclusive edges
};

// The four canonical analysis bands: theta 3-7, alpha 8-15, beta 16-31, gamma 32-45 Hz.
inline std::vector<BandSpec> canonical_bands() {
    return {{"theta", 3.0, 7.0}, {"alpha", 8.0, 15.0}, {"beta", 16.0, 31.0}, {"gamma", 32.0, 45.0}};
}

// Band-power matrix: one row per band, one column per analysis window.
struct BandSpectrogram {
    Eigen::MatrixXd values;  // [bands x windows], nonnegative
    std::vector<BandSpec> bands;
    WindowGeometry geometry;
    double sample_rate_hz = 0.0;
};

// Number of full windows: 0 if the first window does not fit, else
// floor((n - window_len)/hop) + 1.
inline std::size_t window_count(std::size_t n_samples, const WindowGeometry& geometry) {
    geometry.validate();
    if (n_samples < geometry.window_len) return 0;
    return (n_samples - geometry.window_len) / geometry.hop + 1;
}

namespace detail {

// In-place radix-2 decimation-in-time FFT; n must be a power of two.
inline void fft_pow2(std::vector<std::complex<double>>& a) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = -2.0 * std::numbers::pi / static_cast<double>(len);
        const std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = a[i + k];
                const std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

}  // namespace detail

// One-sided power spectrum of a length-N window: P[k] = |DFT[k]|^2 / N^2 for
// k = 0..N/2.  With this normalization an on-bin cosine of amplitude A yields
// P = (A/2)^2 and a constant c yields P[0] = c^2.  Bins 1..N/2-1 each stand
// for a conjugate-symmetric pair, so doubling them and adding the DC and
// Nyquist bins once recovers the window's mean square (Parseval):
//   mean(x^2) = P[0] + P[N/2] + 2 * sum_{0<k<N/2} P[k].
inline std::vector<double> periodogram(std::span<const double> window) {
    const std::size_t n = window.size();
    if (n < 2) throw data_error("periodogram: window too short");
    std::vector<double> power(n / 2 + 1);
    const double norm = 1.0 / (static_cast<double>(n) * static_cast<double>(n));
    if ((n & (n - 1)) == 0) {
        std::vector<std::complex<double>> buf(window.begin(), window.end());
        detail::fft_pow2(buf);
        for (std::size_t k = 0; k <= n / 2; ++k) power[k] = std::norm(buf[k]) * norm;
    } else {
        for (std::size_t k = 0; k <= n / 2; ++k) {  // direct DFT for odd sizes
            double re = 0.0, im = 0.0;
            for (std::size_t t = 0; t < n; ++t) {
                const double ang =
                    -2.0 * std::numbers::pi * static_cast<double>(k * t) / static_cast<double>(n);
                re += window[t] * std::cos(ang);
                im += window[t] * std::sin(ang);
            }
            power[k] = (re * re + im * im) * norm;
        }
    }
    return power;
}

// Bins whose center frequency k * fs / N lies inside [low, high] (inclusive).
inline std::vector<std::size_t> band_bins(const BandSpec& band, std::size_t window_len,
                                          double sample_rate_hz) {
    if (!(band.low_hz <= band.high_hz)) throw data_error("band_bins: low > high");
    if (window_len == 0 || window_len % 2 != 0) throw data_error("band_bins: window_len must be even");
    const double df = sample_rate_hz / static_cast<double>(window_len);
    std::vector<std::size_t> bins;
    for (std::size_t k = 0; k <= window_len / 2; ++k) {
        const double f = static_cast<double>(k) * df;
        if (f >= band.low_hz && f <= band.high_hz) bins.push_back(k);
    }
    if (bins.empty())
        throw data_error("band_bins: band '" + band.name + "' narrower than frequency resolution");
    return bins;
}

// Rectangular-window band-power spectrogram: entry [b][w] is the mean
// periodogram power over the band's bins for the w-th window.
inline BandSpectrogram band_spectrogram(const Signal& signal, const WindowGeometry& geometry,
                                        const std::vector<BandSpec>& bands) {
    signal.validate();
    if (signal.channels != 1) throw data_error("band_spectrogram: expects a single channel");
    const std::size_t n_windows = window_count(signal.n_frames(), geometry);
    if (n_windows == 0) throw data_error("band_spectrogram: signal shorter than one window");

    std::vector<std::vector<std::size_t>> bins(bands.size());
    for (std::size_t b = 0; b < bands.size(); ++b)
        bins[b] = band_bins(bands[b], geometry.window_len, signal.sample_rate_hz);

    BandSpectrogram result;
    result.bands = bands;
    result.geometry = geometry;
    result.sample_rate_hz = signal.sample_rate_hz;
    result.values.resize(static_cast<Eigen::Index>(bands.size()),
                         static_cast<Eigen::Index>(n_windows));
    const auto samples = signal.channel(0);
    for (std::size_t w = 0; w < n_windows; ++w) {
        const auto power = periodogram(samples.subspan(w * geometry.hop, geometry.window_len));
        for (std::size_t b = 0; b < bands.size(); ++b) {
            double acc = 0.0;
            for (const std::size_t k : bins[b]) acc += power[k];
            result.values(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(w)) =
                acc / static_cast<double>(bins[b].size());
        }
    }
    return result;
}

}  // namespace stimrec
