#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "stimrec/dataset.hpp"
#include "stimrec/errors.hpp"
#include "stimrec/rng.hpp"
#include "stimrec/signal.hpp"
#include "stimrec/spectrogram.hpp"

namespace stimrec {

struct SynthConfig {
    std::size_t n_subjects = 1;
    std::size_t n_trials = 40;
    double trial_seconds = 60.0;
    Eigen::Matrix4d coupling = Eigen::Matrix4d::Identity();  // audio band -> EEG band
    double noise_snr_db = 10.0;
    std::uint64_t seed = 0;

    void validate() const {
        if (n_subjects == 0) throw data_error("synth: need at least one subject");
        if (n_trials < 6) throw data_error("synth: need at least 6 trials for nested CV");
        if (trial_seconds * 128.0 < 64.0) throw data_error("synth: trial shorter than one window");
    }
};

namespace detail {

// Linear interpolation of (grid_x, grid_y) at x, clamped at both ends.
inline double interp_clamped(const std::vector<double>& grid_x, const std::vector<double>& grid_y,
                             double x) {
    if (x <= grid_x.front()) return grid_y.front();
    if (x >= grid_x.back()) return grid_y.back();
    const auto it = std::upper_bound(grid_x.begin(), grid_x.end(), x);
    const std::size_t hi = static_cast<std::size_t>(it - grid_x.begin());
    const double w = (x - grid_x[hi - 1]) / (grid_x[hi] - grid_x[hi - 1]);
    return grid_y[hi - 1] + w * (grid_y[hi] - grid_y[hi - 1]);
}

inline void quantize_f32(std::vector<double>& samples) {
    for (double& v : samples) v = static_cast<double>(static_cast<float>(v));
}

inline std::string index_label(char prefix, std::size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%c%02zu", prefix, index + 1);
    return buf;
}

}  // namespace detail

// One trial of paired audio + 32-channel EEG.
//
// Audio: six sinusoids allocated to the bands as {theta:1, alpha:1, beta:2,
// gamma:2}.  Carrier frequencies sit exactly on analysis bins (even-integer
// Hz for 64-sample windows at 128 Hz), so the measured band powers track the
// intended envelopes without scalloping or cross-carrier leakage.  Each
// sinusoid's squared envelope is a baseline power plus 2-3 signed exponential
// excursions (bursts and dips, tau = 6 s) whose onsets fall shortly before
// the trial starts: within the trial every band power relaxes exponentially,
// so the band-mean power slope stays an exact linear function of the
// instantaneous band powers (keeps the slope target decodable), while random
// excursion signs leave no deterministic power trajectory shared across
// trials (keeps the zero-coupling null calibrated).  All four bands carry the
// same excursion fraction rho of their baseline power with one sign per band,
// which makes per-trial correlation variance homogeneous; signs are redrawn
// until the net band-mean slope coefficient is coherent, so the slope target
// never degenerates by cancellation.  The redraw test is sign-flip symmetric,
// preserving the zero-mean property.
//
// EEG: T7/T8 carry one sinusoidal carrier per band at the analysis bin
// nearest the band center, amplitude sqrt(coupling * audio band power)
// interpolated between window centers; white Gaussian noise is added at
// noise_snr_db relative to the carrier mean square.  The other 30 channels
// are pure noise.
inline void synth_trial(Rng& rng, const SynthConfig& config, const WindowGeometry& geometry,
                        const std::vector<BandSpec>& bands, Signal& eeg, Signal& audio) {
    constexpr double kRate = 128.0;
    constexpr double kTau = 6.0;
    const std::size_t n = static_cast<std::size_t>(config.trial_seconds * kRate + 1e-9);
    const std::size_t n_sin = 6;
    const std::size_t alloc[n_sin] = {0, 1, 2, 2, 3, 3};

    // Draw the six sinusoids: on-bin carrier, baseline power, signed bursts.
    const double bin_hz = kRate / static_cast<double>(geometry.window_len);
    std::vector<double> freq(n_sin), phase(n_sin), base_power(n_sin), weight(n_sin);
    std::vector<std::vector<std::pair<double, double>>> bursts(n_sin);  // (onset s, power amp)
    for (std::size_t i = 0; i < n_sin; ++i) {
        const BandSpec& band = bands[alloc[i]];
        const auto k_lo = static_cast<std::uint64_t>(std::ceil(band.low_hz / bin_hz));
        const auto k_hi = static_cast<std::uint64_t>(std::floor(band.high_hz / bin_hz));
        freq[i] = bin_hz * static_cast<double>(k_lo + rng.below(k_hi - k_lo + 1));
        phase[i] = rng.uniform(0.0, 6.283185307179586476925286766559);
        base_power[i] = 0.6 + 0.8 * rng.uniform();
        const std::size_t n_bursts = 2 + rng.below(2);
        bursts[i].resize(n_bursts);
        weight[i] = 0.0;
        for (auto& [onset, amp] : bursts[i]) {
            onset = rng.uniform(-8.0, -0.5);
            amp = (0.25 + 0.55 * rng.uniform()) * base_power[i] / static_cast<double>(n_bursts);
            weight[i] += amp * std::exp(onset / kTau);  // excursion power left at t = 0
        }
    }

    // Equalize the excursion-to-baseline fraction: every sinusoid's bursts
    // are rescaled so the excursion power left at t = 0 equals rho times its
    // baseline (rho < 1 also guarantees positive squared envelopes).
    const double rho = 0.15 + 0.4 * rng.uniform();
    for (std::size_t i = 0; i < n_sin; ++i) {
        const double rescale = rho * base_power[i] / weight[i];
        for (auto& [onset, amp] : bursts[i]) amp *= rescale;
        weight[i] = rho * base_power[i];
    }

    // One excursion sign per band: redraw until the net band-mean slope
    // coefficient, after per-band mean-power equalization, keeps at least
    // 40% of its maximum attainable magnitude.
    const double e_mean = kTau / config.trial_seconds *
                          (1.0 - std::exp(-config.trial_seconds / kTau));
    std::vector<double> band_sign(bands.size(), 1.0);
    for (int attempt = 0; attempt < 64; ++attempt) {
        double net = 0.0, total = 0.0;
        for (double& s : band_sign) {
            s = rng.uniform() < 0.5 ? 1.0 : -1.0;
            const double slope_coeff = s * rho / (1.0 + s * rho * e_mean);
            net += slope_coeff;
            total += std::abs(slope_coeff);
        }
        if (std::abs(net) >= 0.4 * total) break;
    }
    std::vector<double> sign(n_sin);
    for (std::size_t i = 0; i < n_sin; ++i) sign[i] = band_sign[alloc[i]];

    // Squared envelope = baseline + signed decaying excursions, floored at 0
    // (unreachable by construction: excursions stay below the baseline).
    std::vector<std::vector<double>> envs(n_sin, std::vector<double>(n));
    for (std::size_t i = 0; i < n_sin; ++i) {
        for (std::size_t s = 0; s < n; ++s) {
            const double t = static_cast<double>(s) / kRate;
            double power = base_power[i];
            for (const auto& [onset, amp] : bursts[i])
                if (t >= onset) power += sign[i] * amp * std::exp(-(t - onset) / kTau);
            envs[i][s] = std::sqrt(std::max(power, 0.0));
        }
    }

    // Equalize the time-mean envelope power per band: mean_t sum_i env_i^2 =
    // 0.25 * n_bins, so after bin averaging every band reads the same scale.
    for (std::size_t b = 0; b < bands.size(); ++b) {
        const double n_bins =
            static_cast<double>(band_bins(bands[b], geometry.window_len, kRate).size());
        double mean_sq = 0.0;
        for (std::size_t i = 0; i < n_sin; ++i)
            if (alloc[i] == b)
                for (std::size_t s = 0; s < n; ++s) mean_sq += envs[i][s] * envs[i][s];
        mean_sq /= static_cast<double>(n);
        const double scale = std::sqrt(0.25 * n_bins / mean_sq);
        for (std::size_t i = 0; i < n_sin; ++i)
            if (alloc[i] == b)
                for (double& v : envs[i]) v *= scale;
    }

    // Per-band component waveforms, so measured band powers can be equalized.
    std::vector<std::vector<double>> components(bands.size(), std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n_sin; ++i) {
        const double w = 2.0 * std::numbers::pi * freq[i];
        for (std::size_t s = 0; s < n; ++s) {
            const double t = static_cast<double>(s) / kRate;
            components[alloc[i]][s] += envs[i][s] * std::sin(w * t + phase[i]);
        }
    }

    audio.sample_rate_hz = kRate;
    audio.channels = 1;
    audio.samples.assign(n, 0.0);
    for (const auto& component : components)
        for (std::size_t s = 0; s < n; ++s) audio.samples[s] += component[s];

    // The envelope-based normalization above leaves percent-level spread in
    // the realized band powers (spectral leakage, windowing, sinusoid cross
    // terms).  One measured correction per band pins the time-mean band power
    // of every trial to the same value, which keeps the null pipeline free of
    // a band-mean pattern shared between training means and test trials.
    {
        const BandSpectrogram measured = band_spectrogram(audio, geometry, bands);
        for (std::size_t b = 0; b < bands.size(); ++b) {
            const double mean_power = measured.values.row(static_cast<Eigen::Index>(b)).mean();
            if (mean_power <= 0.0) continue;
            const double scale = std::sqrt(0.125 / mean_power);
            for (std::size_t s = 0; s < n; ++s)
                audio.samples[s] += (scale - 1.0) * components[b][s];
            for (std::size_t s = 0; s < n; ++s) components[b][s] *= scale;
        }
    }

    // Audio band powers -> target EEG band powers through the coupling map.
    const BandSpectrogram pa = band_spectrogram(audio, geometry, bands);
    Eigen::MatrixXd pe = config.coupling * pa.values;
    pe = pe.cwiseMax(0.0);

    const std::size_t n_windows = static_cast<std::size_t>(pa.values.cols());
    std::vector<double> centers(n_windows);
    for (std::size_t w = 0; w < n_windows; ++w)
        centers[w] = (static_cast<double>(w * geometry.hop) +
                      (static_cast<double>(geometry.window_len) - 1.0) / 2.0) /
                     kRate;

    const auto channel_names = deap_channel_names();
    eeg.sample_rate_hz = kRate;
    eeg.channels = channel_names.size();
    eeg.samples.assign(eeg.channels * n, 0.0);
    const double snr_power = std::pow(10.0, config.noise_snr_db / 10.0);
    for (std::size_t c = 0; c < channel_names.size(); ++c) {
        const auto row = eeg.channel(c);
        double mean_sq = 0.0;
        if (channel_names[c] == "T7" || channel_names[c] == "T8") {
            for (std::size_t b = 0; b < bands.size(); ++b) {
                const double fc =
                    bin_hz * std::round(0.5 * (bands[b].low_hz + bands[b].high_hz) / bin_hz);
                const double ph = rng.uniform(0.0, 6.283185307179586476925286766559);
                std::vector<double> amp_grid(n_windows);
                for (std::size_t w = 0; w < n_windows; ++w)
                    amp_grid[w] = std::sqrt(pe(static_cast<Eigen::Index>(b),
                                               static_cast<Eigen::Index>(w)));
                const double wc = 2.0 * std::numbers::pi * fc;
                for (std::size_t s = 0; s < n; ++s) {
                    const double t = static_cast<double>(s) / kRate;
                    row[s] += detail::interp_clamped(centers, amp_grid, t) * std::cos(wc * t + ph);
                }
            }
            for (std::size_t s = 0; s < n; ++s) mean_sq += row[s] * row[s];
            mean_sq /= static_cast<double>(n);
        }
        const double sigma = mean_sq > 0.0 ? std::sqrt(mean_sq / snr_power)
                                           : std::pow(10.0, -config.noise_snr_db / 20.0);
        for (std::size_t s = 0; s < n; ++s) row[s] += sigma * rng.normal();
    }

    detail::quantize_f32(audio.samples);  // float32 storage round-trips exactly
    detail::quantize_f32(eeg.samples);
}

// Deterministic function of the config: each (subject, trial) gets its own
// stream seeded by splitmix-derived state.
inline std::vector<TrialSet> generate_synthetic(const SynthConfig& config) {
    config.validate();
    const WindowGeometry geometry;
    const auto bands = canonical_bands();
    std::vector<TrialSet> subjects;
    subjects.reserve(config.n_subjects);
    for (std::size_t subject = 0; subject < config.n_subjects; ++subject) {
        TrialSet ts;
        ts.subject_id = detail::index_label('S', subject);
        ts.channel_names = deap_channel_names();
        for (std::size_t trial = 0; trial < config.n_trials; ++trial) {
            Rng rng(mix_seed(config.seed, subject, trial));
            Signal eeg, audio;
            synth_trial(rng, config, geometry, bands, eeg, audio);
            ts.trial_ids.push_back(detail::index_label('T', trial));
            ts.eeg_trials.push_back(std::move(eeg));
            ts.audio_trials.push_back(std::move(audio));
        }
        ts.validate();
        subjects.push_back(std::move(ts));
    }
    return subjects;
}

// Coupling presets for the CLI: identity, zero, or a seeded random mix.
inline Eigen::Matrix4d make_coupling(const std::string& kind, std::uint64_t seed) {
    if (kind == "identity") return Eigen::Matrix4d::Identity();
    if (kind == "zero") return Eigen::Matrix4d::Zero();
    if (kind == "random") {
        Rng rng(mix_seed(seed, 0xC001));
        Eigen::Matrix4d m;
        for (Eigen::Index r = 0; r < 4; ++r)
            for (Eigen::Index c = 0; c < 4; ++c) m(r, c) = rng.uniform();
        return m;
    }
    throw data_error("unknown coupling kind: " + kind);
}

}  // namespace stimrec
