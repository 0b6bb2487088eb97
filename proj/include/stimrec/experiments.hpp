#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "stimrec/dataset.hpp"
#include "stimrec/errors.hpp"
#include "stimrec/regression.hpp"
#include "stimrec/sigproc.hpp"
#include "stimrec/spectrogram.hpp"
#include "stimrec/stats.hpp"

namespace stimrec {

enum class TargetKind { spectrogram, slope };

inline std::string target_name(TargetKind target) {
    return target == TargetKind::spectrogram ? "spectrogram" : "slope";
}

inline TargetKind target_from_name(const std::string& name) {
    if (name == "spectrogram") return TargetKind::spectrogram;
    if (name == "slope") return TargetKind::slope;
    throw data_error("unknown experiment target: " + name);
}

// 13 log-spaced values, 1e-3 .. 1e3.
inline std::vector<double> default_lambda_grid() {
    std::vector<double> grid(13);
    for (std::size_t i = 0; i < grid.size(); ++i)
        grid[i] = std::pow(10.0, -3.0 + 6.0 * static_cast<double>(i) / 12.0);
    return grid;
}

struct ExperimentConfig {
    TargetKind target = TargetKind::spectrogram;
    double smoothing_sigma = 2.0;  // window units
    std::vector<double> lambda_grid = default_lambda_grid();
    std::size_t lags = 0;
    std::uint64_t seed = 0;
    std::vector<BandSpec> bands = canonical_bands();
    WindowGeometry geometry;
    double analysis_rate_hz = 128.0;
    double filter_low_hz = 4.0;
    double filter_high_hz = 45.0;
    std::size_t n_threads = 1;  // execution detail; never serialized

    void validate() const {
        if (lambda_grid.empty()) throw data_error("experiment config: empty lambda grid");
        if (!(smoothing_sigma > 0.0))
            throw data_error("experiment config: smoothing sigma must be positive");
        if (bands.empty()) throw data_error("experiment config: no bands");
        geometry.validate();
    }
};

struct TrialScore {
    std::string trial_id;
    double r = 0.0;
    double p = 1.0;
    double lambda = 0.0;
    std::vector<double> band_r;  // per-band diagnostics (spectrogram target only)
};

struct SubjectReport {
    std::string subject_id;
    std::vector<TrialScore> per_trial;
    double mean_r = 0.0;
    double fused_p = 1.0;
};

namespace detail {

inline Signal to_analysis_rate(const Signal& signal, double rate_hz) {
    if (signal.sample_rate_hz == rate_hz) return signal;
    return resample(signal, rate_hz);
}

}  // namespace detail

// EEG front end, one 4xW band spectrogram per trial: select T7/T8, bandpass
// both channels, compute each channel's band spectrogram, average the two
// matrices elementwise.
inline std::vector<BandSpectrogram> make_eeg_features(const TrialSet& trialset,
                                                      const ExperimentConfig& config) {
    config.validate();
    std::vector<BandSpectrogram> features;
    features.reserve(trialset.n_trials());
    for (const Signal& trial : trialset.eeg_trials) {
        const Signal temporal = detail::to_analysis_rate(
            select_temporal_channels(trial, trialset.channel_names), config.analysis_rate_hz);
        const Signal filtered = bandpass(temporal, config.filter_low_hz, config.filter_high_hz);
        BandSpectrogram mean_gram;
        for (std::size_t c = 0; c < 2; ++c) {
            Signal mono;
            mono.sample_rate_hz = filtered.sample_rate_hz;
            mono.channels = 1;
            const auto row = filtered.channel(c);
            mono.samples.assign(row.begin(), row.end());
            BandSpectrogram gram = band_spectrogram(mono, config.geometry, config.bands);
            if (c == 0)
                mean_gram = std::move(gram);
            else
                mean_gram.values = 0.5 * (mean_gram.values + gram.values);
        }
        features.push_back(std::move(mean_gram));
    }
    return features;
}

// Audio target, [n_outputs x W_target]:
//   spectrogram -> per-band power rows, each smoothed        (4 x W)
//   slope       -> band-mean power, differenced, smoothed    (1 x W-1)
inline Eigen::MatrixXd make_audio_target(const Signal& audio, const ExperimentConfig& config) {
    config.validate();
    if (audio.channels != 1) throw data_error("make_audio_target: audio must be single-channel");
    const Signal at_rate = detail::to_analysis_rate(audio, config.analysis_rate_hz);
    const BandSpectrogram gram = band_spectrogram(at_rate, config.geometry, config.bands);
    const Eigen::Index n_windows = gram.values.cols();

    if (config.target == TargetKind::spectrogram) {
        Eigen::MatrixXd target(gram.values.rows(), n_windows);
        std::vector<double> row(static_cast<std::size_t>(n_windows));
        for (Eigen::Index b = 0; b < gram.values.rows(); ++b) {
            for (Eigen::Index w = 0; w < n_windows; ++w)
                row[static_cast<std::size_t>(w)] = gram.values(b, w);
            const auto smoothed = gaussian_smooth(row, config.smoothing_sigma);
            for (Eigen::Index w = 0; w < n_windows; ++w)
                target(b, w) = smoothed[static_cast<std::size_t>(w)];
        }
        return target;
    }

    std::vector<double> mean_power(static_cast<std::size_t>(n_windows));
    for (Eigen::Index w = 0; w < n_windows; ++w)
        mean_power[static_cast<std::size_t>(w)] = gram.values.col(w).mean();
    const auto slope = gaussian_smooth(first_derivative(mean_power), config.smoothing_sigma);
    Eigen::MatrixXd target(1, static_cast<Eigen::Index>(slope.size()));
    for (std::size_t w = 0; w < slope.size(); ++w)
        target(0, static_cast<Eigen::Index>(w)) = slope[w];
    return target;
}

// Full per-subject pipeline: features + targets per trial, LOSO ridge, then
// per-trial Pearson r/p on the flattened [outputs x windows] block, subject
// mean r, and the Fisher-fused p.
inline SubjectReport run_subject(const TrialSet& trialset, const ExperimentConfig& config) {
    config.validate();
    trialset.validate();
    if (trialset.n_trials() < 6) throw data_error("run_subject: need at least 6 trials");

    // Canonical trial order, sorted by id: every downstream quantity (fold
    // seeds, training stack order, report rows) then depends on the trial set
    // alone, so shuffling the manifest cannot change any per-trial result.
    std::vector<std::size_t> order(trialset.n_trials());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return trialset.trial_ids[a] < trialset.trial_ids[b];
    });

    const auto features = make_eeg_features(trialset, config);
    std::vector<TrialFeatures> trials(trialset.n_trials());
    std::vector<Eigen::MatrixXd> truths(trialset.n_trials());  // [outputs x W_target]
    for (std::size_t t = 0; t < trialset.n_trials(); ++t) {
        const std::size_t at = order[t];
        Eigen::MatrixXd X = embed_temporal(features[at], config.lags);
        truths[t] = make_audio_target(trialset.audio_trials[at], config);
        const Eigen::Index n_target = truths[t].cols();
        if (n_target > X.rows())
            throw data_error("run_subject: trial " + trialset.trial_ids[at] +
                             " audio yields more windows than EEG");
        trials[t].X = X.topRows(n_target);  // slope targets drop the last window
        trials[t].Y = truths[t].transpose();
    }

    const auto folds = loso_run(trials, config.lambda_grid, config.seed, config.n_threads);

    SubjectReport report;
    report.subject_id = trialset.subject_id;
    std::vector<double> pvals;
    for (std::size_t t = 0; t < folds.size(); ++t) {
        // Flatten truth and prediction in [outputs x windows] row-major order.
        const Eigen::MatrixXd pred = folds[t].prediction.transpose();
        std::vector<double> flat_true, flat_pred;
        flat_true.reserve(static_cast<std::size_t>(truths[t].size()));
        flat_pred.reserve(static_cast<std::size_t>(truths[t].size()));
        for (Eigen::Index b = 0; b < truths[t].rows(); ++b)
            for (Eigen::Index w = 0; w < truths[t].cols(); ++w) {
                flat_true.push_back(truths[t](b, w));
                flat_pred.push_back(pred(b, w));
            }
        TrialScore score;
        score.trial_id = trialset.trial_ids[order[t]];
        score.lambda = folds[t].lambda;
        score.r = pearson_r(flat_true, flat_pred);
        score.p = pearson_p(score.r, flat_true.size());
        if (config.target == TargetKind::spectrogram) {
            for (Eigen::Index b = 0; b < truths[t].rows(); ++b) {
                const Eigen::VectorXd tb = truths[t].row(b).transpose();
                const Eigen::VectorXd pb = pred.row(b).transpose();
                const std::span<const double> ts(tb.data(), static_cast<std::size_t>(tb.size()));
                const std::span<const double> ps(pb.data(), static_cast<std::size_t>(pb.size()));
                score.band_r.push_back(pearson_r(ts, ps));
            }
        }
        pvals.push_back(score.p);
        report.per_trial.push_back(std::move(score));
    }

    double sum_r = 0.0;
    for (const auto& score : report.per_trial) sum_r += score.r;
    report.mean_r = sum_r / static_cast<double>(report.per_trial.size());
    report.fused_p = fisher_fuse(pvals);
    return report;
}

}  // namespace stimrec
