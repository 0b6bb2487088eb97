#pragma once

// Shared test utilities: scratch directories, byte-level file comparison,
// signal builders, and a driver for the command-line binary.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#ifdef __unix__
#include <sys/wait.h>
#endif

#include "stimrec/signal.hpp"

namespace testutil {

namespace fs = std::filesystem;

// Unique scratch directory, removed recursively on destruction.
class TempDir {
 public:
    TempDir() {
        static std::atomic<unsigned> counter{0};
        const unsigned id = counter.fetch_add(1);
        path_ = fs::temp_directory_path() /
                ("stimrec_test_" + std::to_string(::getpid()) + "_" + std::to_string(id));
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const { return path_; }
    fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
    fs::path path_;
};

inline std::string read_bytes(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline bool files_equal(const fs::path& a, const fs::path& b) {
    return read_bytes(a) == read_bytes(b);
}

// Byte-compares two directory trees: same relative paths, same contents.
inline bool dirs_equal(const fs::path& a, const fs::path& b) {
    std::map<std::string, fs::path> in_a, in_b;
    for (const auto& entry : fs::recursive_directory_iterator(a))
        if (entry.is_regular_file()) in_a[fs::relative(entry.path(), a).string()] = entry.path();
    for (const auto& entry : fs::recursive_directory_iterator(b))
        if (entry.is_regular_file()) in_b[fs::relative(entry.path(), b).string()] = entry.path();
    if (in_a.size() != in_b.size()) return false;
    for (const auto& [rel, path] : in_a) {
        const auto it = in_b.find(rel);
        if (it == in_b.end() || !files_equal(path, it->second)) return false;
    }
    return true;
}

// Single-channel sinusoid a*sin(2*pi*f*t + phase).
inline stimrec::Signal make_tone(double freq_hz, double amplitude, double rate_hz,
                                 std::size_t n_samples, double phase = 0.0) {
    std::vector<double> samples(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i)
        samples[i] = amplitude *
                     std::sin(2.0 * std::numbers::pi * freq_hz * static_cast<double>(i) / rate_hz +
                              phase);
    return stimrec::Signal(std::move(samples), rate_hz, 1);
}

inline double rms(std::span<const double> values) {
    double acc = 0.0;
    for (const double v : values) acc += v * v;
    return std::sqrt(acc / static_cast<double>(values.size()));
}

// Two-sided Kolmogorov-Smirnov statistic against Uniform(0,1).
inline double ks_uniform(std::vector<double> pvals) {
    std::sort(pvals.begin(), pvals.end());
    const double n = static_cast<double>(pvals.size());
    double d = 0.0;
    for (std::size_t i = 0; i < pvals.size(); ++i) {
        const double hi = (static_cast<double>(i) + 1.0) / n - pvals[i];
        const double lo = pvals[i] - static_cast<double>(i) / n;
        d = std::max({d, hi, lo});
    }
    return d;
}

inline bool close_rel(double a, double b, double rel, double abs_floor = 0.0) {
    return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b)) + abs_floor;
}

#ifdef STIMREC_CLI_PATH
struct CliResult {
    int exit_code = -1;
    std::string output;  // stdout + stderr combined
};

// Runs the CLI with the given argument string, capturing combined output.
inline CliResult run_cli(const std::string& args, const fs::path& work_dir) {
    const fs::path out_file = work_dir / "cli_output.txt";
    const std::string cmd = "cd '" + work_dir.string() + "' && '" + STIMREC_CLI_PATH + "' " +
                            args + " > '" + out_file.string() + "' 2>&1";
    const int status = std::system(cmd.c_str());
    CliResult result;
#ifdef __unix__
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
#else
    result.exit_code = status;
#endif
    result.output = read_bytes(out_file);
    std::error_code ec;
    fs::remove(out_file, ec);
    return result;
}
#endif

}  // namespace testutil
