#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stimrec/errors.hpp"
#include "stimrec/spectrogram.hpp"

namespace stimrec {

static_assert(std::endian::native == std::endian::little,
              "sample files are little-endian; big-endian hosts are unsupported");

using ordered_json = nlohmann::ordered_json;

// Raw sample files: float32 little-endian, row-major [channel][sample].
inline void write_f32(const std::filesystem::path& path, std::span<const double> values) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw data_error("cannot open for writing: " + path.string());
    std::vector<float> buf(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) buf[i] = static_cast<float>(values[i]);
    out.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size() * sizeof(float)));
    if (!out) throw data_error("write failed: " + path.string());
}

inline std::vector<double> read_f32(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("cannot open for reading: " + path.string());
    in.seekg(0, std::ios::end);
    const auto bytes = static_cast<std::size_t>(in.tellg());
    if (bytes % sizeof(float) != 0)
        throw data_error("file size not a multiple of 4 bytes: " + path.string());
    in.seekg(0, std::ios::beg);
    std::vector<float> buf(bytes / sizeof(float));
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(bytes));
    if (!in) throw data_error("read failed: " + path.string());
    return {buf.begin(), buf.end()};
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);  // binary: LF only
    if (!out) throw data_error("cannot open for writing: " + path.string());
    out << text;
    if (!out) throw data_error("write failed: " + path.string());
}

inline std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("cannot open for reading: " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return text;
}

inline ordered_json parse_json_file(const std::filesystem::path& path) {
    try {
        return ordered_json::parse(read_text(path));
    } catch (const nlohmann::json::exception& e) {
        throw data_error("malformed JSON in " + path.string() + ": " + e.what());
    }
}

inline ordered_json band_to_json(const BandSpec& band) {
    return ordered_json{{"name", band.name}, {"low_hz", band.low_hz}, {"high_hz", band.high_hz}};
}

inline BandSpec band_from_json(const ordered_json& j) {
    return BandSpec{j.at("name").get<std::string>(), j.at("low_hz").get<double>(),
                    j.at("high_hz").get<double>()};
}

// Feature files: raw float32 LE matrix [bands][windows] plus a JSON sidecar
// describing bands, window geometry, and sampling rate.
inline void write_feature_file(const std::filesystem::path& data_path,
                               const BandSpectrogram& features) {
    std::vector<double> flat;
    flat.reserve(static_cast<std::size_t>(features.values.size()));
    for (Eigen::Index b = 0; b < features.values.rows(); ++b)
        for (Eigen::Index w = 0; w < features.values.cols(); ++w)
            flat.push_back(features.values(b, w));
    write_f32(data_path, flat);

    ordered_json side;
    side["version"] = 1;
    side["sample_rate_hz"] = features.sample_rate_hz;
    side["window_len"] = features.geometry.window_len;
    side["hop"] = features.geometry.hop;
    side["n_bands"] = features.values.rows();
    side["n_windows"] = features.values.cols();
    side["bands"] = ordered_json::array();
    for (const auto& band : features.bands) side["bands"].push_back(band_to_json(band));
    write_text(data_path.string() + ".json", side.dump(2) + "\n");
}

inline BandSpectrogram read_feature_file(const std::filesystem::path& data_path) {
    const ordered_json side = parse_json_file(data_path.string() + ".json");
    BandSpectrogram features;
    features.sample_rate_hz = side.at("sample_rate_hz").get<double>();
    features.geometry.window_len = side.at("window_len").get<std::size_t>();
    features.geometry.hop = side.at("hop").get<std::size_t>();
    for (const auto& j : side.at("bands")) features.bands.push_back(band_from_json(j));
    const auto n_bands = side.at("n_bands").get<Eigen::Index>();
    const auto n_windows = side.at("n_windows").get<Eigen::Index>();
    const auto flat = read_f32(data_path);
    if (static_cast<Eigen::Index>(flat.size()) != n_bands * n_windows)
        throw data_error("feature file size mismatch: " + data_path.string());
    features.values.resize(n_bands, n_windows);
    for (Eigen::Index b = 0; b < n_bands; ++b)
        for (Eigen::Index w = 0; w < n_windows; ++w)
            features.values(b, w) = flat[static_cast<std::size_t>(b * n_windows + w)];
    return features;
}

}  // namespace stimrec
