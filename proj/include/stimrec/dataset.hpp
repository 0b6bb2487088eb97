#pragma once

#include <algorithm>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "stimrec/errors.hpp"
#include "stimrec/io.hpp"
#include "stimrec/signal.hpp"

namespace stimrec {

// One subject's paired EEG/audio trials.
struct TrialSet {
    std::string subject_id;
    std::vector<std::string> channel_names;
    std::vector<std::string> trial_ids;
    std::vector<Signal> eeg_trials;    // multi-channel, one per trial
    std::vector<Signal> audio_trials;  // single-channel, one per trial

    std::size_t n_trials() const { return eeg_trials.size(); }

    void validate() const {
        if (eeg_trials.size() != audio_trials.size() || eeg_trials.size() != trial_ids.size())
            throw data_error("trialset: eeg/audio/id list lengths differ");
        std::set<std::string> seen(channel_names.begin(), channel_names.end());
        if (seen.size() != channel_names.size())
            throw data_error("trialset: duplicate channel names");
        for (std::size_t t = 0; t < eeg_trials.size(); ++t) {
            eeg_trials[t].validate();
            audio_trials[t].validate();
            if (eeg_trials[t].channels != channel_names.size())
                throw data_error("trialset: trial " + trial_ids[t] +
                                 " channel count differs from channel_names");
            if (t > 0 && eeg_trials[t].n_frames() != eeg_trials[0].n_frames())
                throw data_error("trialset: trial " + trial_ids[t] + " sample count differs");
            if (audio_trials[t].channels != 1)
                throw data_error("trialset: audio trial " + trial_ids[t] + " must be single-channel");
        }
    }
};

// The 32 electrode labels of the standard Geneva ordering used by DEAP.
inline std::vector<std::string> deap_channel_names() {
    return {"Fp1", "AF3", "F3",  "F7",  "FC5", "FC1", "C3",  "T7",  "CP5", "CP1", "P3",
            "P7",  "PO3", "O1",  "Oz",  "Pz",  "Fp2", "AF4", "Fz",  "F4",  "F8",  "FC6",
            "FC2", "Cz",  "C4",  "T8",  "CP6", "CP2", "P4",  "P8",  "PO4", "O2"};
}

// Writes dir/manifest.json plus one float32 LE file per trial and stream.
inline void save_trialset(const TrialSet& ts, const std::filesystem::path& dir) {
    ts.validate();
    std::filesystem::create_directories(dir);
    ordered_json manifest;
    manifest["version"] = 1;
    manifest["subject_id"] = ts.subject_id;
    manifest["sample_rate_hz"] = ts.eeg_trials.empty() ? 128.0 : ts.eeg_trials[0].sample_rate_hz;
    manifest["audio_rate_hz"] = ts.audio_trials.empty() ? 128.0 : ts.audio_trials[0].sample_rate_hz;
    manifest["channel_names"] = ts.channel_names;
    manifest["trials"] = ordered_json::array();
    for (std::size_t t = 0; t < ts.n_trials(); ++t) {
        const std::string eeg_file = ts.trial_ids[t] + "_eeg.f32";
        const std::string audio_file = ts.trial_ids[t] + "_audio.f32";
        write_f32(dir / eeg_file, ts.eeg_trials[t].samples);
        write_f32(dir / audio_file, ts.audio_trials[t].samples);
        manifest["trials"].push_back(ordered_json{{"id", ts.trial_ids[t]},
                                                  {"eeg_file", eeg_file},
                                                  {"audio_file", audio_file},
                                                  {"n_samples", ts.eeg_trials[t].n_frames()},
                                                  {"n_audio_samples", ts.audio_trials[t].n_frames()}});
    }
    write_text(dir / "manifest.json", manifest.dump(2) + "\n");
}

inline TrialSet load_trialset(const std::filesystem::path& manifest_or_dir) {
    namespace fs = std::filesystem;
    fs::path manifest_path = manifest_or_dir;
    if (fs::is_directory(manifest_path)) manifest_path /= "manifest.json";
    if (!fs::exists(manifest_path))
        throw data_error("manifest not found: " + manifest_path.string());
    const fs::path dir = manifest_path.parent_path();
    const ordered_json manifest = parse_json_file(manifest_path);

    try {
        if (manifest.at("version").get<int>() != 1)
            throw data_error("unsupported manifest version in " + manifest_path.string());
        TrialSet ts;
        ts.subject_id = manifest.at("subject_id").get<std::string>();
        ts.channel_names = manifest.at("channel_names").get<std::vector<std::string>>();
        const double eeg_rate = manifest.at("sample_rate_hz").get<double>();
        const double audio_rate = manifest.contains("audio_rate_hz")
                                      ? manifest.at("audio_rate_hz").get<double>()
                                      : eeg_rate;
        for (const auto& trial : manifest.at("trials")) {
            const auto id = trial.at("id").get<std::string>();
            const auto n_samples = trial.at("n_samples").get<std::size_t>();
            const auto n_audio = trial.contains("n_audio_samples")
                                     ? trial.at("n_audio_samples").get<std::size_t>()
                                     : n_samples;
            if (n_samples == 0) throw data_error("trial " + id + ": n_samples must be positive");

            const fs::path eeg_path = dir / trial.at("eeg_file").get<std::string>();
            const fs::path audio_path = dir / trial.at("audio_file").get<std::string>();
            for (const auto& [path, expect] :
                 {std::pair{eeg_path, n_samples * ts.channel_names.size()},
                  std::pair{audio_path, n_audio}}) {
                if (!fs::exists(path))
                    throw data_error("trial " + id + ": missing file " + path.string());
                if (fs::file_size(path) != expect * sizeof(float))
                    throw data_error("trial " + id + ": size mismatch in " + path.string());
            }
            ts.trial_ids.push_back(id);
            ts.eeg_trials.emplace_back(read_f32(eeg_path), eeg_rate, ts.channel_names.size());
            ts.audio_trials.emplace_back(read_f32(audio_path), audio_rate, 1);
        }
        ts.validate();
        return ts;
    } catch (const nlohmann::json::exception& e) {
        throw data_error("bad manifest " + manifest_path.string() + ": " + e.what());
    }
}

// Pulls the T7 and T8 rows (by name, order-independent) into a 2-channel signal.
inline Signal select_temporal_channels(const Signal& trial,
                                       const std::vector<std::string>& channel_names) {
    trial.validate();
    if (channel_names.size() != trial.channels)
        throw data_error("select_temporal_channels: name list does not match channel count");
    Signal out;
    out.sample_rate_hz = trial.sample_rate_hz;
    out.channels = 2;
    out.samples.reserve(2 * trial.n_frames());
    for (const char* wanted : {"T7", "T8"}) {
        const auto it = std::find(channel_names.begin(), channel_names.end(), wanted);
        if (it == channel_names.end())
            throw data_error(std::string("select_temporal_channels: missing channel ") + wanted);
        const auto row = trial.channel(static_cast<std::size_t>(it - channel_names.begin()));
        out.samples.insert(out.samples.end(), row.begin(), row.end());
    }
    return out;
}

}  // namespace stimrec
