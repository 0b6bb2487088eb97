#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "stimrec/errors.hpp"
#include "stimrec/signal.hpp"

namespace stimrec {

// Truncated sampled Gaussian, renormalized to unit sum.
struct GaussianKernel {
    double sigma = 0.0;
    std::size_t radius = 0;
    std::vector<double> weights;  // length 2*radius + 1, symmetric

    explicit GaussianKernel(double sigma_) : sigma(sigma_) {
        if (!(sigma > 0.0)) throw data_error("gaussian kernel: sigma must be positive");
        radius = static_cast<std::size_t>(std::ceil(4.0 * sigma));
        weights.resize(2 * radius + 1);
        double sum = 0.0;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            const double d = static_cast<double>(i) - static_cast<double>(radius);
            weights[i] = std::exp(-0.5 * d * d / (sigma * sigma));
            sum += weights[i];
        }
        for (double& w : weights) w /= sum;
    }
};

namespace detail {

inline double sinc(double x) {
    if (std::abs(x) < 1e-12) return 1.0;
    const double px = std::numbers::pi * x;
    return std::sin(px) / px;
}

// Reflect an index into [0, n) without repeating the edge sample: -1 -> 1, n -> n-2.
inline std::size_t reflect_index(long long i, std::size_t n) {
    if (n == 1) return 0;
    const long long period = 2 * (static_cast<long long>(n) - 1);
    long long j = ((i % period) + period) % period;
    if (j >= static_cast<long long>(n)) j = period - j;
    return static_cast<std::size_t>(j);
}

}  // namespace detail

// Band-limited resampling by windowed-sinc interpolation evaluated at the
// exact output instants t_k = k / target_rate.  The kernel spans 32 input
// samples on each side, carries a Hamming taper, and is low-passed at
// 0.45 * min(source, target) to suppress aliasing when decimating.  The
// kernel is renormalized per output instant so a constant signal passes
// through exactly.
inline Signal resample(const Signal& signal, double target_rate_hz) {
    signal.validate();
    if (signal.samples.empty()) throw data_error("resample: empty signal");
    if (!(target_rate_hz > 0.0)) throw data_error("resample: target rate must be positive");

    const double source_rate = signal.sample_rate_hz;
    const std::size_t n_in = signal.n_frames();
    const long double exact =
        static_cast<long double>(n_in) * target_rate_hz / source_rate;
    const std::size_t n_out = static_cast<std::size_t>(std::floor(exact + 1e-9L));
    const double cutoff_hz = 0.45 * std::min(source_rate, target_rate_hz);
    const double fc = cutoff_hz / source_rate;  // cycles per input sample
    constexpr long long kHalfWidth = 32;

    Signal out;
    out.sample_rate_hz = target_rate_hz;
    out.channels = signal.channels;
    out.samples.assign(n_out * signal.channels, 0.0);

    for (std::size_t c = 0; c < signal.channels; ++c) {
        const auto src = signal.channel(c);
        const auto dst = out.channel(c);
        for (std::size_t k = 0; k < n_out; ++k) {
            // Position of output instant k in input-sample units.
            const double pos = static_cast<double>(
                static_cast<long double>(k) * source_rate / target_rate_hz);
            const long long base = static_cast<long long>(std::floor(pos));
            double acc = 0.0, wsum = 0.0;
            for (long long j = -kHalfWidth + 1; j <= kHalfWidth; ++j) {
                const long long idx = base + j;
                if (idx < 0 || idx >= static_cast<long long>(n_in)) continue;
                const double d = pos - static_cast<double>(idx);
                // Hamming taper over the +-kHalfWidth support.
                const double win =
                    0.54 + 0.46 * std::cos(std::numbers::pi * d / kHalfWidth);
                const double w = 2.0 * fc * detail::sinc(2.0 * fc * d) * win;
                acc += w * src[static_cast<std::size_t>(idx)];
                wsum += w;
            }
            dst[k] = wsum != 0.0 ? acc / wsum : 0.0;
        }
    }
    return out;
}

// Zero-phase bandpass: 255-tap linear-phase FIR (Hamming-windowed sinc
// difference) with the 127-sample group delay removed, so the output stays
// aligned with the input.  Samples beyond the ends are taken as zero; the
// first and last ~taps/2 samples therefore contain the filter transient.
inline Signal bandpass(const Signal& signal, double low_hz, double high_hz) {
    signal.validate();
    const double nyquist = signal.sample_rate_hz / 2.0;
    if (!(0.0 < low_hz && low_hz < high_hz && high_hz < nyquist))
        throw data_error("bandpass: need 0 < low < high < Nyquist");

    constexpr std::size_t kTaps = 255;
    constexpr long long kDelay = (kTaps - 1) / 2;  // 127
    const double f_lo = low_hz / signal.sample_rate_hz;
    const double f_hi = high_hz / signal.sample_rate_hz;

    // h[k] = hp_sinc - lp_sinc, tapered: ideal bandpass truncated at 255 taps.
    std::vector<double> h(kTaps);
    for (std::size_t k = 0; k < kTaps; ++k) {
        const double d = static_cast<double>(k) - static_cast<double>(kDelay);
        const double ideal =
            2.0 * f_hi * detail::sinc(2.0 * f_hi * d) - 2.0 * f_lo * detail::sinc(2.0 * f_lo * d);
        const double win = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * k / (kTaps - 1));
        h[k] = ideal * win;
    }

    const std::size_t n = signal.n_frames();
    Signal out;
    out.sample_rate_hz = signal.sample_rate_hz;
    out.channels = signal.channels;
    out.samples.assign(signal.samples.size(), 0.0);
    for (std::size_t c = 0; c < signal.channels; ++c) {
        const auto src = signal.channel(c);
        const auto dst = out.channel(c);
        for (std::size_t t = 0; t < n; ++t) {
            double acc = 0.0;
            // y[t] = sum_k h[k] * x[t + delay - k]; indexes past the ends read 0.
            const long long centered = static_cast<long long>(t) + kDelay;
            const std::size_t k_lo =
                centered >= static_cast<long long>(n)
                    ? static_cast<std::size_t>(centered - static_cast<long long>(n) + 1)
                    : 0;
            const std::size_t k_hi =
                std::min<std::size_t>(kTaps - 1, static_cast<std::size_t>(centered));
            for (std::size_t k = k_lo; k <= k_hi; ++k)
                acc += h[k] * src[static_cast<std::size_t>(centered) - k];
            dst[t] = acc;
        }
    }
    return out;
}

// Convolve with a normalized Gaussian (radius ceil(4*sigma)); boundaries use
// reflect padding without edge duplication: s[-1] == s[1].
inline std::vector<double> gaussian_smooth(std::span<const double> series, double sigma) {
    if (series.empty()) throw data_error("gaussian_smooth: empty series");
    const GaussianKernel kernel(sigma);
    const std::size_t n = series.size();
    std::vector<double> out(n);
    for (std::size_t t = 0; t < n; ++t) {
        double acc = 0.0;
        for (std::size_t i = 0; i < kernel.weights.size(); ++i) {
            const long long src = static_cast<long long>(t) + static_cast<long long>(i) -
                                  static_cast<long long>(kernel.radius);
            acc += kernel.weights[i] * series[detail::reflect_index(src, n)];
        }
        out[t] = acc;
    }
    return out;
}

// Forward difference d[i] = s[i+1] - s[i]; length n-1.
inline std::vector<double> first_derivative(std::span<const double> series) {
    if (series.size() < 2) throw data_error("first_derivative: need at least 2 samples");
    std::vector<double> out(series.size() - 1);
    for (std::size_t i = 0; i + 1 < series.size(); ++i) out[i] = series[i + 1] - series[i];
    return out;
}

}  // namespace stimrec
