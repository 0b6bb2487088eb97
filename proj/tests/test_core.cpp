#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <set>
#include <vector>

#include "stimrec/rng.hpp"
#include "stimrec/sigproc.hpp"
#include "stimrec/spectrogram.hpp"

#include "helpers.hpp"
#include "oracles.hpp"

using stimrec::Signal;
using testutil::close_rel;
using testutil::make_tone;
using testutil::rms;

namespace {

std::vector<double> random_vector(std::uint64_t seed, std::size_t n, double lo = -1.0,
                                  double hi = 1.0) {
    stimrec::Rng rng(seed);
    std::vector<double> out(n);
    for (double& v : out) v = rng.uniform(lo, hi);
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Random streams
// ---------------------------------------------------------------------------

TEST_CASE("random stream is reproducible for a fixed seed", "[rng]") {
    stimrec::Rng a(42), b(42);
    for (int i = 0; i < 32; ++i) REQUIRE(a.uniform() == b.uniform());
    for (int i = 0; i < 32; ++i) REQUIRE(a.below(100) == b.below(100));
    for (int i = 0; i < 32; ++i) REQUIRE(a.normal() == b.normal());
    stimrec::Rng c(43);
    bool any_differ = false;
    for (int i = 0; i < 8; ++i) any_differ = any_differ || (a.uniform() != c.uniform());
    REQUIRE(any_differ);
}

TEST_CASE("uniform and integer draws stay inside their ranges", "[rng]") {
    stimrec::Rng rng(7);
    for (int i = 0; i < 1000; ++i) {
        const double u = rng.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        const double v = rng.uniform(-2.0, 5.0);
        REQUIRE(v >= -2.0);
        REQUIRE(v < 5.0);
    }
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 2000; ++i) {
        const std::uint64_t k = rng.below(7);
        REQUIRE(k < 7);
        seen.insert(k);
    }
    REQUIRE(seen.size() == 7);  // every residue reachable
}

TEST_CASE("normal draws have near-standard moments", "[rng]") {
    stimrec::Rng rng(123);
    const int n = 20000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = rng.normal();
        sum += z;
        sum2 += z * z;
    }
    const double mean = sum / n;
    const double var = sum2 / n - mean * mean;
    REQUIRE(std::abs(mean) < 0.03);
    REQUIRE(std::abs(var - 1.0) < 0.05);
}

TEST_CASE("seed mixing separates nearby index pairs", "[rng]") {
    REQUIRE(stimrec::mix_seed(7, 0, 1) != stimrec::mix_seed(7, 1, 0));
    REQUIRE(stimrec::mix_seed(7, 3) != stimrec::mix_seed(8, 3));
    std::set<std::uint64_t> streams;
    for (std::uint64_t a = 0; a < 32; ++a)
        for (std::uint64_t b = 0; b < 32; ++b) streams.insert(stimrec::mix_seed(5, a, b));
    REQUIRE(streams.size() == 32u * 32u);
}

// ---------------------------------------------------------------------------
// Resampling
// ---------------------------------------------------------------------------

TEST_CASE("resample preserves a constant signal", "[sigproc]") {
    const Signal in(std::vector<double>(512, 3.0), 512.0, 1);
    const Signal out = stimrec::resample(in, 128.0);
    REQUIRE(out.n_frames() == 128);
    REQUIRE(out.sample_rate_hz == 128.0);
    for (std::size_t k = 8; k + 8 < out.n_frames(); ++k)
        REQUIRE(std::abs(out.samples[k] - 3.0) < 1e-6);
}

TEST_CASE("resample tracks an in-band sinusoid pointwise", "[sigproc]") {
    const Signal in = make_tone(10.0, 1.0, 512.0, 2048);
    const Signal out = stimrec::resample(in, 128.0);
    REQUIRE(out.n_frames() == 512);
    // Compare against the true sinusoid evaluated at the output instants.
    const std::size_t margin = out.n_frames() / 10;
    for (std::size_t k = margin; k + margin < out.n_frames(); ++k) {
        const double expected = std::sin(2.0 * std::numbers::pi * 10.0 * double(k) / 128.0);
        REQUIRE(std::abs(out.samples[k] - expected) < 0.01);
    }
}

TEST_CASE("resample suppresses content above the output band", "[sigproc]") {
    const Signal in = make_tone(100.0, 1.0, 512.0, 2048);  // above 64 Hz output Nyquist
    const Signal out = stimrec::resample(in, 128.0);
    const std::size_t margin = out.n_frames() / 10;
    const std::span<const double> mid(out.samples.data() + margin, out.n_frames() - 2 * margin);
    REQUIRE(rms(mid) < 0.05 * rms(in.samples));
}

TEST_CASE("resample output length is floor(n * target / source)", "[sigproc]") {
    const Signal in(random_vector(1, 1000), 441.0, 1);
    const Signal out = stimrec::resample(in, 128.0);
    REQUIRE(out.n_frames() == 290);  // floor(1000 * 128 / 441)
}

TEST_CASE("resample rejects bad inputs", "[sigproc]") {
    const Signal empty(std::vector<double>{}, 128.0, 1);
    REQUIRE_THROWS_AS(stimrec::resample(empty, 64.0), stimrec::data_error);
    const Signal ok(std::vector<double>(64, 0.0), 128.0, 1);
    REQUIRE_THROWS_AS(stimrec::resample(ok, 0.0), stimrec::data_error);
    REQUIRE_THROWS_AS(stimrec::resample(ok, -1.0), stimrec::data_error);
}

// ---------------------------------------------------------------------------
// Bandpass filtering
// ---------------------------------------------------------------------------

TEST_CASE("bandpass passes an in-band tone nearly unchanged", "[sigproc]") {
    const Signal in = make_tone(20.0, 1.0, 128.0, 1024);
    const Signal out = stimrec::bandpass(in, 4.0, 45.0);
    REQUIRE(out.n_frames() == in.n_frames());
    const std::size_t margin = in.n_frames() / 5;  // keep the filter transient out
    double max_err = 0.0;
    for (std::size_t t = margin; t + margin < in.n_frames(); ++t)
        max_err = std::max(max_err, std::abs(out.samples[t] - in.samples[t]));
    REQUIRE(max_err < 0.02);  // amplitude and phase both within 2%
}

TEST_CASE("bandpass rejects a tone below the band", "[sigproc]") {
    const Signal in = make_tone(1.0, 1.0, 128.0, 1024);
    const Signal out = stimrec::bandpass(in, 4.0, 45.0);
    const std::size_t margin = in.n_frames() / 5;
    const std::span<const double> mid(out.samples.data() + margin,
                                      in.n_frames() - 2 * margin);
    REQUIRE(rms(mid) < 0.05 * rms(in.samples));
}

TEST_CASE("bandpass removes a constant offset", "[sigproc]") {
    const Signal in(std::vector<double>(512, 5.0), 128.0, 1);
    const Signal out = stimrec::bandpass(in, 4.0, 45.0);
    double acc = 0.0;
    for (std::size_t t = 128; t < 384; ++t) acc += std::abs(out.samples[t]);
    REQUIRE(acc / 256.0 < 0.05 * 5.0);
}

TEST_CASE("bandpass applied twice changes the passband output by under 1%", "[sigproc]") {
    const Signal in = make_tone(20.0, 1.0, 128.0, 2048);
    const Signal once = stimrec::bandpass(in, 4.0, 45.0);
    const Signal twice = stimrec::bandpass(once, 4.0, 45.0);
    const std::size_t margin = in.n_frames() / 5;
    const std::span<const double> mid_once(once.samples.data() + margin,
                                           in.n_frames() - 2 * margin);
    const std::span<const double> mid_twice(twice.samples.data() + margin,
                                            in.n_frames() - 2 * margin);
    REQUIRE(std::abs(rms(mid_twice) / rms(mid_once) - 1.0) < 0.01);
}

TEST_CASE("bandpass validates its corner frequencies", "[sigproc]") {
    const Signal in(std::vector<double>(256, 0.0), 128.0, 1);
    REQUIRE_THROWS_AS(stimrec::bandpass(in, 45.0, 4.0), stimrec::data_error);
    REQUIRE_THROWS_AS(stimrec::bandpass(in, 4.0, 64.0), stimrec::data_error);
    REQUIRE_THROWS_AS(stimrec::bandpass(in, 0.0, 45.0), stimrec::data_error);
    REQUIRE_THROWS_AS(stimrec::bandpass(in, -1.0, 45.0), stimrec::data_error);
}

// ---------------------------------------------------------------------------
// Gaussian smoothing
// ---------------------------------------------------------------------------

TEST_CASE("gaussian kernel is normalized and symmetric", "[sigproc]") {
    const stimrec::GaussianKernel kernel(2.0);
    REQUIRE(kernel.radius == 8);  // ceil(4 * sigma)
    REQUIRE(kernel.weights.size() == 17);
    double sum = 0.0;
    for (const double w : kernel.weights) sum += w;
    REQUIRE(std::abs(sum - 1.0) < 1e-12);
    for (std::size_t i = 0; i < kernel.weights.size(); ++i)
        REQUIRE(kernel.weights[i] == kernel.weights[kernel.weights.size() - 1 - i]);
    REQUIRE_THROWS_AS(stimrec::GaussianKernel(0.0), stimrec::data_error);
    REQUIRE_THROWS_AS(stimrec::GaussianKernel(-2.0), stimrec::data_error);
}

TEST_CASE("smoothing a constant series is exact", "[sigproc]") {
    const std::vector<double> series(64, 2.5);
    const std::vector<double> out = stimrec::gaussian_smooth(series, 2.0);
    for (const double v : out) REQUIRE(std::abs(v - 2.5) < 1e-12);
}

TEST_CASE("smoothing an interior impulse reproduces the kernel weights", "[sigproc]") {
    std::vector<double> series(65, 0.0);
    series[32] = 1.0;
    const std::vector<double> out = stimrec::gaussian_smooth(series, 2.0);
    const stimrec::GaussianKernel kernel(2.0);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const long long offset = static_cast<long long>(i) - 32;
        const double expected =
            std::llabs(offset) <= 8 ? kernel.weights[static_cast<std::size_t>(offset + 8)] : 0.0;
        REQUIRE(std::abs(out[i] - expected) < 1e-12);
    }
}

TEST_CASE("smoothing a linear ramp leaves the interior unchanged", "[sigproc]") {
    std::vector<double> ramp(100);
    for (std::size_t i = 0; i < ramp.size(); ++i) ramp[i] = static_cast<double>(i);
    const std::vector<double> out = stimrec::gaussian_smooth(ramp, 2.0);
    for (std::size_t i = 10; i < 90; ++i) REQUIRE(std::abs(out[i] - ramp[i]) < 1e-9);
}

TEST_CASE("smoothed values stay inside the input range", "[sigproc]") {
    const std::vector<double> series = random_vector(3, 200);
    const std::vector<double> out = stimrec::gaussian_smooth(series, 1.5);
    const auto [lo, hi] = std::minmax_element(series.begin(), series.end());
    for (const double v : out) {
        REQUIRE(v >= *lo - 1e-12);
        REQUIRE(v <= *hi + 1e-12);
    }
}

TEST_CASE("smoothing commutes with shifts away from the boundary", "[sigproc]") {
    const std::vector<double> x = random_vector(5, 120);
    std::vector<double> shifted(x.size(), 0.0);
    const std::size_t shift = 5;
    for (std::size_t i = shift; i < x.size(); ++i) shifted[i] = x[i - shift];
    const std::vector<double> sx = stimrec::gaussian_smooth(x, 2.0);
    const std::vector<double> ss = stimrec::gaussian_smooth(shifted, 2.0);
    const std::size_t radius = stimrec::GaussianKernel(2.0).radius;
    for (std::size_t i = shift + radius; i + radius < x.size(); ++i)
        REQUIRE(std::abs(ss[i] - sx[i - shift]) < 1e-12);
}

TEST_CASE("gaussian smoothing rejects bad inputs", "[sigproc]") {
    REQUIRE_THROWS_AS(stimrec::gaussian_smooth(std::vector<double>{}, 2.0), stimrec::data_error);
    REQUIRE_THROWS_AS(stimrec::gaussian_smooth(std::vector<double>{1.0, 2.0}, 0.0),
                      stimrec::data_error);
}

// ---------------------------------------------------------------------------
// First differences
// ---------------------------------------------------------------------------

TEST_CASE("first differences of simple sequences", "[sigproc]") {
    REQUIRE(stimrec::first_derivative(std::vector<double>{0, 1, 2, 3}) ==
            std::vector<double>{1, 1, 1});
    REQUIRE(stimrec::first_derivative(std::vector<double>(5, 4.2)) ==
            std::vector<double>{0, 0, 0, 0});
    REQUIRE(stimrec::first_derivative(std::vector<double>{1, 4, 9, 16}) ==
            std::vector<double>{3, 5, 7});
    REQUIRE_THROWS_AS(stimrec::first_derivative(std::vector<double>{1.0}), stimrec::data_error);
}

TEST_CASE("differencing a running sum recovers the tail of the series", "[sigproc]") {
    const std::vector<double> s = random_vector(9, 50);
    std::vector<double> cumulative(s.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        acc += s[i];
        cumulative[i] = acc;
    }
    const std::vector<double> d = stimrec::first_derivative(cumulative);
    REQUIRE(d.size() == s.size() - 1);
    for (std::size_t i = 0; i < d.size(); ++i) REQUIRE(std::abs(d[i] - s[i + 1]) < 1e-12);
}

// ---------------------------------------------------------------------------
// Linearity of the signal operators
// ---------------------------------------------------------------------------

TEST_CASE("resample, bandpass, and smoothing are linear", "[sigproc]") {
    const std::vector<double> xs = random_vector(21, 512);
    const std::vector<double> ys = random_vector(22, 512);
    const double a = 2.5, b = -1.25;
    std::vector<double> zs(512);
    for (std::size_t i = 0; i < zs.size(); ++i) zs[i] = a * xs[i] + b * ys[i];
    const Signal x(std::vector<double>(xs), 128.0, 1);
    const Signal y(std::vector<double>(ys), 128.0, 1);
    const Signal z(std::vector<double>(zs), 128.0, 1);

    {
        const Signal rx = stimrec::resample(x, 64.0);
        const Signal ry = stimrec::resample(y, 64.0);
        const Signal rz = stimrec::resample(z, 64.0);
        for (std::size_t i = 0; i < rz.n_frames(); ++i)
            REQUIRE(std::abs(rz.samples[i] - (a * rx.samples[i] + b * ry.samples[i])) < 1e-9);
    }
    {
        const Signal fx = stimrec::bandpass(x, 4.0, 45.0);
        const Signal fy = stimrec::bandpass(y, 4.0, 45.0);
        const Signal fz = stimrec::bandpass(z, 4.0, 45.0);
        for (std::size_t i = 0; i < fz.n_frames(); ++i)
            REQUIRE(std::abs(fz.samples[i] - (a * fx.samples[i] + b * fy.samples[i])) < 1e-9);
    }
    {
        const std::vector<double> sx = stimrec::gaussian_smooth(xs, 2.0);
        const std::vector<double> sy = stimrec::gaussian_smooth(ys, 2.0);
        const std::vector<double> sz = stimrec::gaussian_smooth(zs, 2.0);
        for (std::size_t i = 0; i < sz.size(); ++i)
            REQUIRE(std::abs(sz[i] - (a * sx[i] + b * sy[i])) < 1e-9);
    }
}

// ---------------------------------------------------------------------------
// Window geometry
// ---------------------------------------------------------------------------

TEST_CASE("window counts for the default geometry", "[spectrogram]") {
    const stimrec::WindowGeometry geometry;  // 64-sample windows, hop 56
    REQUIRE(stimrec::window_count(7680, geometry) == 137);
    REQUIRE(stimrec::window_count(64, geometry) == 1);
    REQUIRE(stimrec::window_count(63, geometry) == 0);
    REQUIRE(stimrec::window_count(0, geometry) == 0);
    for (std::size_t k = 0; k <= 10; ++k)
        REQUIRE(stimrec::window_count(64 + 56 * k, geometry) == k + 1);
    REQUIRE_THROWS_AS(stimrec::window_count(100, stimrec::WindowGeometry{64, 0}),
                      stimrec::data_error);
    REQUIRE_THROWS_AS(stimrec::window_count(100, stimrec::WindowGeometry{64, 65}),
                      stimrec::data_error);
    REQUIRE(stimrec::window_count(128, stimrec::WindowGeometry{64, 64}) == 2);
}

// ---------------------------------------------------------------------------
// Periodogram
// ---------------------------------------------------------------------------

TEST_CASE("periodogram of a constant concentrates at the zero bin", "[spectrogram]") {
    const std::vector<double> window(64, 1.7);
    const std::vector<double> power = stimrec::periodogram(window);
    REQUIRE(power.size() == 33);
    REQUIRE(std::abs(power[0] - 1.7 * 1.7) < 1e-12);
    for (std::size_t k = 1; k < power.size(); ++k) REQUIRE(std::abs(power[k]) < 1e-12);
}

TEST_CASE("periodogram of an on-bin cosine has power (A/2)^2 at its bin", "[spectrogram]") {
    std::vector<double> window(64);
    const double amplitude = 0.8;
    for (std::size_t i = 0; i < window.size(); ++i)
        window[i] = amplitude * std::cos(2.0 * std::numbers::pi * 8.0 * double(i) / 64.0);
    const std::vector<double> power = stimrec::periodogram(window);
    REQUIRE(std::abs(power[8] - 0.16) < 1e-12);  // (0.8 / 2)^2
    for (std::size_t k = 0; k < power.size(); ++k)
        if (k != 8) REQUIRE(std::abs(power[k]) < 1e-12);
}

TEST_CASE("periodogram agrees with direct DFT summation", "[spectrogram]") {
    stimrec::Rng rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> window(64);
        for (double& v : window) v = rng.uniform(-1.0, 1.0);
        const std::vector<double> fast = stimrec::periodogram(window);
        const std::vector<double> direct = oracle::dft_power(window);
        REQUIRE(fast.size() == direct.size());
        for (std::size_t k = 0; k < fast.size(); ++k)
            REQUIRE(close_rel(fast[k], direct[k], 1e-9, 1e-15));
    }
    // Non power-of-two lengths run through the direct path.
    const std::vector<double> window = random_vector(12, 48);
    const std::vector<double> fast = stimrec::periodogram(window);
    const std::vector<double> direct = oracle::dft_power(window);
    for (std::size_t k = 0; k < fast.size(); ++k)
        REQUIRE(close_rel(fast[k], direct[k], 1e-9, 1e-15));
}

TEST_CASE("periodogram handles the shortest windows and rejects shorter", "[spectrogram]") {
    REQUIRE(stimrec::periodogram(std::vector<double>{1.0, -1.0}).size() == 2);
    REQUIRE_THROWS_AS(stimrec::periodogram(std::vector<double>{1.0}), stimrec::data_error);
    REQUIRE_THROWS_AS(stimrec::periodogram(std::vector<double>{}), stimrec::data_error);
}

TEST_CASE("windowed mean square power obeys the bin-doubling identity", "[spectrogram]") {
    // mean(x^2) = P[0] + P[N/2] + 2 * sum of interior bins.
    const std::vector<double> window = random_vector(13, 64);
    const std::vector<double> power = stimrec::periodogram(window);
    double mean_square = 0.0;
    for (const double v : window) mean_square += v * v;
    mean_square /= static_cast<double>(window.size());
    double total = power.front() + power.back();
    for (std::size_t k = 1; k + 1 < power.size(); ++k) total += 2.0 * power[k];
    REQUIRE(close_rel(mean_square, total, 1e-9));
}

// ---------------------------------------------------------------------------
// Band bin selection
// ---------------------------------------------------------------------------

TEST_CASE("band bins for the canonical bands at 128 Hz", "[spectrogram]") {
    const auto bands = stimrec::canonical_bands();
    REQUIRE(bands.size() == 4);
    REQUIRE(stimrec::band_bins(bands[0], 64, 128.0) == std::vector<std::size_t>{2, 3});
    REQUIRE(stimrec::band_bins(bands[1], 64, 128.0) == std::vector<std::size_t>{4, 5, 6, 7});
    REQUIRE(stimrec::band_bins(bands[2], 64, 128.0) ==
            std::vector<std::size_t>{8, 9, 10, 11, 12, 13, 14, 15});
    REQUIRE(stimrec::band_bins(bands[3], 64, 128.0) ==
            std::vector<std::size_t>{16, 17, 18, 19, 20, 21, 22});
}

TEST_CASE("band bins degenerate and error cases", "[spectrogram]") {
    REQUIRE(stimrec::band_bins({"dc", 0.0, 0.0}, 64, 128.0) == std::vector<std::size_t>{0});
    REQUIRE_THROWS_AS(stimrec::band_bins({"narrow", 4.5, 5.5}, 64, 128.0), stimrec::data_error);
    REQUIRE_THROWS_AS(stimrec::band_bins({"alpha", 8.0, 15.0}, 63, 128.0), stimrec::data_error);
    REQUIRE_THROWS_AS(stimrec::band_bins({"swapped", 15.0, 8.0}, 64, 128.0), stimrec::data_error);
}

// ---------------------------------------------------------------------------
// Band spectrogram
// ---------------------------------------------------------------------------

TEST_CASE("band spectrogram of a constant signal is zero everywhere", "[spectrogram]") {
    const Signal signal(std::vector<double>(7680, 2.0), 128.0, 1);
    const auto gram =
        stimrec::band_spectrogram(signal, stimrec::WindowGeometry{}, stimrec::canonical_bands());
    REQUIRE(gram.values.rows() == 4);
    REQUIRE(gram.values.cols() == 137);
    REQUIRE(gram.values.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("band spectrogram localizes an on-bin tone to its band", "[spectrogram]") {
    // 12 Hz sits on bin 6; the 4-bin 8-15 Hz row averages (1/2)^2 / 4.
    std::vector<double> samples(7680);
    for (std::size_t i = 0; i < samples.size(); ++i)
        samples[i] = std::cos(2.0 * std::numbers::pi * 12.0 * double(i) / 128.0);
    const Signal signal(std::move(samples), 128.0, 1);
    const auto gram =
        stimrec::band_spectrogram(signal, stimrec::WindowGeometry{}, stimrec::canonical_bands());
    for (Eigen::Index w = 0; w < gram.values.cols(); ++w) {
        REQUIRE(std::abs(gram.values(1, w) - 0.0625) < 1e-10);
        REQUIRE(std::abs(gram.values(0, w)) < 1e-10);
        REQUIRE(std::abs(gram.values(2, w)) < 1e-10);
        REQUIRE(std::abs(gram.values(3, w)) < 1e-10);
    }
}

TEST_CASE("band spectrogram equals windowed periodogram band means exactly", "[spectrogram]") {
    const Signal signal(random_vector(31, 200), 128.0, 1);
    const stimrec::WindowGeometry geometry;
    const auto bands = stimrec::canonical_bands();
    const auto gram = stimrec::band_spectrogram(signal, geometry, bands);
    REQUIRE(gram.values.cols() == 3);
    for (std::size_t w = 0; w < 3; ++w) {
        const std::vector<double> window(signal.samples.begin() + w * geometry.hop,
                                         signal.samples.begin() + w * geometry.hop + 64);
        const std::vector<double> power = stimrec::periodogram(window);
        for (std::size_t b = 0; b < bands.size(); ++b) {
            const auto bins = stimrec::band_bins(bands[b], 64, 128.0);
            double mean = 0.0;
            for (const std::size_t k : bins) mean += power[k];
            mean /= static_cast<double>(bins.size());
            // Same windowing rule, so the composition is bit-identical.
            REQUIRE(gram.values(Eigen::Index(b), Eigen::Index(w)) == mean);
        }
    }
}

TEST_CASE("band spectrogram agrees with the direct DFT band oracle", "[spectrogram]") {
    const Signal signal(random_vector(33, 300), 128.0, 1);
    const stimrec::WindowGeometry geometry;
    const auto bands = stimrec::canonical_bands();
    const auto gram = stimrec::band_spectrogram(signal, geometry, bands);
    for (Eigen::Index w = 0; w < gram.values.cols(); ++w) {
        const std::vector<double> window(
            signal.samples.begin() + std::size_t(w) * geometry.hop,
            signal.samples.begin() + std::size_t(w) * geometry.hop + 64);
        for (std::size_t b = 0; b < bands.size(); ++b) {
            const double expected =
                oracle::band_power_direct(window, bands[b].low_hz, bands[b].high_hz, 128.0);
            REQUIRE(close_rel(gram.values(Eigen::Index(b), w), expected, 1e-9, 1e-15));
        }
    }
}

TEST_CASE("band spectrogram input validation", "[spectrogram]") {
    const Signal two_channel(std::vector<double>(256, 0.0), 128.0, 2);
    REQUIRE_THROWS_AS(stimrec::band_spectrogram(two_channel, stimrec::WindowGeometry{},
                                                stimrec::canonical_bands()),
                      stimrec::data_error);
    const Signal short_signal(std::vector<double>(63, 0.0), 128.0, 1);
    REQUIRE_THROWS_AS(stimrec::band_spectrogram(short_signal, stimrec::WindowGeometry{},
                                                stimrec::canonical_bands()),
                      stimrec::data_error);
}

TEST_CASE("band powers scale quadratically with amplitude", "[spectrogram]") {
    std::vector<double> base = random_vector(35, 300);
    std::vector<double> scaled(base.size());
    for (std::size_t i = 0; i < base.size(); ++i) scaled[i] = 3.0 * base[i];
    const auto g1 = stimrec::band_spectrogram(Signal(std::move(base), 128.0, 1),
                                              stimrec::WindowGeometry{}, stimrec::canonical_bands());
    const auto g2 = stimrec::band_spectrogram(Signal(std::move(scaled), 128.0, 1),
                                              stimrec::WindowGeometry{}, stimrec::canonical_bands());
    for (Eigen::Index b = 0; b < g1.values.rows(); ++b)
        for (Eigen::Index w = 0; w < g1.values.cols(); ++w)
            REQUIRE(close_rel(g2.values(b, w), 9.0 * g1.values(b, w), 1e-9, 1e-15));
}

TEST_CASE("each window's band powers depend only on its own samples", "[spectrogram]") {
    // Windows at hop 56: w0 [0,64), w1 [56,120), w2 [112,176), w3 [168,232), w4 [224,288).
    std::vector<double> base = random_vector(37, 300);
    std::vector<double> edited = base;
    edited[20] += 0.5;   // inside window 0 only
    edited[240] -= 0.5;  // inside window 4 only
    const auto g1 = stimrec::band_spectrogram(Signal(std::move(base), 128.0, 1),
                                              stimrec::WindowGeometry{}, stimrec::canonical_bands());
    const auto g2 = stimrec::band_spectrogram(Signal(std::move(edited), 128.0, 1),
                                              stimrec::WindowGeometry{}, stimrec::canonical_bands());
    for (Eigen::Index b = 0; b < 4; ++b) {
        REQUIRE(g1.values(b, 1) == g2.values(b, 1));
        REQUIRE(g1.values(b, 2) == g2.values(b, 2));
        REQUIRE(g1.values(b, 3) == g2.values(b, 3));
    }
    REQUIRE(g1.values.col(0) != g2.values.col(0));
    REQUIRE(g1.values.col(4) != g2.values.col(4));
}

TEST_CASE("band powers are nonnegative", "[spectrogram]") {
    const auto gram = stimrec::band_spectrogram(Signal(random_vector(39, 500), 128.0, 1),
                                                stimrec::WindowGeometry{},
                                                stimrec::canonical_bands());
    REQUIRE(gram.values.minCoeff() >= 0.0);
}
