// stimrec: synthesize datasets, extract band-power features, run the
// reconstruction experiments, and render reports.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric failure.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "stimrec/stimrec.hpp"

namespace fs = std::filesystem;

namespace {

// "lo:hi:count" -> count log-spaced values; otherwise comma-separated numbers.
std::vector<double> parse_lambda_grid(const std::string& spec) {
    std::vector<double> grid;
    try {
        if (spec.find(':') != std::string::npos) {
            const auto first = spec.find(':');
            const auto second = spec.find(':', first + 1);
            if (second == std::string::npos) throw std::invalid_argument("need lo:hi:count");
            const double lo = std::stod(spec.substr(0, first));
            const double hi = std::stod(spec.substr(first + 1, second - first - 1));
            const long count = std::stol(spec.substr(second + 1));
            if (lo <= 0.0 || hi <= 0.0 || count < 1)
                throw std::invalid_argument("need positive lo/hi and count >= 1");
            const double lg_lo = std::log10(lo), lg_hi = std::log10(hi);
            for (long i = 0; i < count; ++i)
                grid.push_back(std::pow(
                    10.0, count == 1 ? lg_lo
                                     : lg_lo + (lg_hi - lg_lo) * static_cast<double>(i) /
                                                   static_cast<double>(count - 1)));
        } else {
            std::size_t pos = 0;
            while (pos <= spec.size()) {
                const auto comma = std::min(spec.find(',', pos), spec.size());
                const std::string token = spec.substr(pos, comma - pos);
                if (token.empty()) throw std::invalid_argument("empty grid element");
                grid.push_back(std::stod(token));
                pos = comma + 1;
            }
            for (const double v : grid)
                if (v < 0.0) throw std::invalid_argument("negative lambda");
        }
    } catch (const std::exception& e) {
        throw CLI::ValidationError("--lambda-grid", std::string("bad grid spec '") + spec +
                                                        "': " + e.what());
    }
    return grid;
}

// A data directory is either one subject (manifest.json inside) or a
// directory of subject subdirectories.
std::vector<fs::path> find_subject_dirs(const fs::path& data_dir) {
    if (!fs::is_directory(data_dir))
        throw stimrec::data_error("data directory not found: " + data_dir.string());
    if (fs::exists(data_dir / "manifest.json")) return {data_dir};
    std::vector<fs::path> dirs;
    for (const auto& entry : fs::directory_iterator(data_dir))
        if (entry.is_directory() && fs::exists(entry.path() / "manifest.json"))
            dirs.push_back(entry.path());
    std::sort(dirs.begin(), dirs.end());
    if (dirs.empty())
        throw stimrec::data_error("no manifest.json under " + data_dir.string());
    return dirs;
}

std::vector<stimrec::TrialSet> load_subjects(const fs::path& data_dir) {
    std::vector<stimrec::TrialSet> subjects;
    for (const auto& dir : find_subject_dirs(data_dir))
        subjects.push_back(stimrec::load_trialset(dir));
    return subjects;
}

struct SynthFlags {
    std::size_t subjects = 1;
    std::size_t trials = 40;
    double seconds = 60.0;
    double snr_db = 10.0;
    std::string coupling = "identity";
    std::uint64_t seed = 0;
    std::string out;
};

int cmd_synth(const SynthFlags& flags) {
    stimrec::SynthConfig config;
    config.n_subjects = flags.subjects;
    config.n_trials = flags.trials;
    config.trial_seconds = flags.seconds;
    config.noise_snr_db = flags.snr_db;
    config.coupling = stimrec::make_coupling(flags.coupling, flags.seed);
    config.seed = flags.seed;
    const auto subjects = stimrec::generate_synthetic(config);
    for (const auto& ts : subjects) {
        stimrec::save_trialset(ts, fs::path(flags.out) / ts.subject_id);
        std::printf("%s: %zu trials x %.3g s at 128 Hz (%s coupling, %.3g dB SNR)\n",
                    ts.subject_id.c_str(), ts.n_trials(), flags.seconds,
                    flags.coupling.c_str(), flags.snr_db);
    }
    return 0;
}

struct FeatureFlags {
    std::string data;
    std::string out;
};

int cmd_features(const FeatureFlags& flags) {
    const stimrec::ExperimentConfig config;  // front-end defaults
    for (const auto& ts : load_subjects(flags.data)) {
        const fs::path dir = fs::path(flags.out) / ts.subject_id;
        fs::create_directories(dir);
        const auto eeg_features = stimrec::make_eeg_features(ts, config);
        for (std::size_t t = 0; t < ts.n_trials(); ++t) {
            stimrec::write_feature_file(dir / (ts.trial_ids[t] + "_eeg_features.f32"),
                                        eeg_features[t]);
            const stimrec::Signal audio =
                ts.audio_trials[t].sample_rate_hz == config.analysis_rate_hz
                    ? ts.audio_trials[t]
                    : stimrec::resample(ts.audio_trials[t], config.analysis_rate_hz);
            stimrec::write_feature_file(
                dir / (ts.trial_ids[t] + "_audio_features.f32"),
                stimrec::band_spectrogram(audio, config.geometry, config.bands));
        }
        std::printf("%s: wrote %zu trial feature pairs to %s\n", ts.subject_id.c_str(),
                    ts.n_trials(), dir.string().c_str());
    }
    return 0;
}

struct RunFlags {
    std::string data;
    std::string experiment = "spectrogram";
    double sigma = 2.0;
    std::size_t lags = 0;
    std::string lambda_grid;
    std::uint64_t seed = 0;
    std::string out = "report.json";
    std::size_t threads = 0;  // 0 = hardware concurrency
};

int cmd_run(const RunFlags& flags) {
    stimrec::ExperimentConfig config;
    config.smoothing_sigma = flags.sigma;
    config.lags = flags.lags;
    config.seed = flags.seed;
    if (!flags.lambda_grid.empty()) config.lambda_grid = parse_lambda_grid(flags.lambda_grid);
    config.n_threads =
        flags.threads > 0 ? flags.threads : std::max(1u, std::thread::hardware_concurrency());

    std::vector<stimrec::TargetKind> targets;
    if (flags.experiment == "both")
        targets = {stimrec::TargetKind::spectrogram, stimrec::TargetKind::slope};
    else
        targets = {stimrec::target_from_name(flags.experiment)};

    const auto subjects = load_subjects(flags.data);
    stimrec::Report report;
    for (const auto target : targets) {
        config.target = target;
        report.results.push_back(stimrec::run_experiment(subjects, config));
    }
    stimrec::write_text(flags.out, stimrec::render_report(report, stimrec::ReportFormat::json));
    std::cout << stimrec::render_report(report, stimrec::ReportFormat::table);
    return 0;
}

struct ReportFlags {
    std::string in;
    std::string format = "table";
};

int cmd_report(const ReportFlags& flags) {
    const auto report = stimrec::report_from_json(stimrec::parse_json_file(flags.in));
    std::cout << stimrec::render_report(report, stimrec::report_format_from_name(flags.format));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"EEG-to-audio band-power reconstruction pipeline"};
    app.require_subcommand(1);

    SynthFlags synth;
    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic paired EEG/audio dataset");
    synth_cmd->add_option("--subjects", synth.subjects, "Number of subjects")
        ->check(CLI::Range(std::size_t{1}, std::size_t{1000}));
    synth_cmd->add_option("--trials", synth.trials, "Trials per subject (minimum 6)")
        ->check(CLI::Range(std::size_t{6}, std::size_t{100000}));
    synth_cmd->add_option("--seconds", synth.seconds, "Trial length in seconds")
        ->check(CLI::Range(0.5, 1e6));
    synth_cmd->add_option("--snr-db", synth.snr_db, "Carrier-to-noise ratio in dB");
    synth_cmd->add_option("--coupling", synth.coupling, "Audio-to-EEG band coupling")
        ->check(CLI::IsMember({"identity", "zero", "random"}));
    synth_cmd->add_option("--seed", synth.seed, "Random seed");
    synth_cmd->add_option("--out", synth.out, "Output dataset directory")->required();

    FeatureFlags features;
    auto* features_cmd =
        app.add_subcommand("features", "Extract band-power features to raw files");
    features_cmd->add_option("--data", features.data, "Dataset directory")->required();
    features_cmd->add_option("--out", features.out, "Output feature directory")->required();

    RunFlags run;
    auto* run_cmd = app.add_subcommand("run", "Run the reconstruction experiments");
    run_cmd->add_option("--data", run.data, "Dataset directory")->required();
    run_cmd->add_option("--experiment", run.experiment, "Which experiment")
        ->check(CLI::IsMember({"spectrogram", "slope", "both"}));
    run_cmd->add_option("--sigma", run.sigma, "Target smoothing sigma (windows)")
        ->check(CLI::PositiveNumber);
    run_cmd->add_option("--lags", run.lags, "Temporal embedding half-width");
    run_cmd->add_option("--lambda-grid", run.lambda_grid,
                        "Ridge grid: 'lo:hi:count' log-spaced or comma-separated values");
    run_cmd->add_option("--seed", run.seed, "Cross-validation shuffle seed");
    run_cmd->add_option("--out", run.out, "Report JSON path");
    run_cmd->add_option("--threads", run.threads, "Worker threads (0 = all cores)");

    ReportFlags report;
    auto* report_cmd = app.add_subcommand("report", "Render a report JSON file");
    report_cmd->add_option("--in", report.in, "Report JSON path")->required();
    report_cmd->add_option("--format", report.format, "Output format")
        ->check(CLI::IsMember({"table", "csv"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (synth_cmd->parsed()) return cmd_synth(synth);
        if (features_cmd->parsed()) return cmd_features(features);
        if (run_cmd->parsed()) return cmd_run(run);
        return cmd_report(report);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const stimrec::numeric_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const stimrec::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
