#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "stimrec/errors.hpp"

namespace stimrec {

// Multichannel time series.  Samples are stored row-major, one channel after
// another: samples[c * n_frames() + t].
struct Signal {
    std::vector<double> samples;
    double sample_rate_hz = 0.0;
    std::size_t channels = 1;

    Signal() = default;
    Signal(std::vector<double> data, double rate, std::size_t n_channels = 1)
        : samples(std::move(data)), sample_rate_hz(rate), channels(n_channels) {
        validate();
    }

    std::size_t n_frames() const { return channels == 0 ? 0 : samples.size() / channels; }

    std::span<const double> channel(std::size_t c) const {
        if (c >= channels) throw data_error("signal: channel index out of range");
        return std::span<const double>(samples).subspan(c * n_frames(), n_frames());
    }

    std::span<double> channel(std::size_t c) {
        if (c >= channels) throw data_error("signal: channel index out of range");
        return std::span<double>(samples).subspan(c * n_frames(), n_frames());
    }

    void validate() const {
        if (sample_rate_hz <= 0.0) throw data_error("signal: sample rate must be positive");
        if (channels == 0) throw data_error("signal: channel count must be positive");
        if (samples.size() % channels != 0)
            throw data_error("signal: sample count not divisible by channel count");
    }
};

}  // namespace stimrec
