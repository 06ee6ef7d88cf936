#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace ecgres {

// Beat classes handled by the detector. Everything outside the five anomaly
// classes collapses to Other at parse time and is dropped downstream.
enum class BeatLabel : uint8_t {
    Normal = 0,
    Lbbb = 1,
    Rbbb = 2,
    Pvc = 3,
    Paced = 4,
    Apb = 5,
    Other = 6,
};

inline constexpr int kNumAnomalies = 5;

const char* label_name(BeatLabel label);
BeatLabel label_from_name(const std::string& name);

inline bool is_anomaly(BeatLabel label) {
    return label != BeatLabel::Normal && label != BeatLabel::Other;
}

// Anomaly classes indexed 0..4 in table order (Lbbb..Apb).
inline int anomaly_index(BeatLabel label) {
    return static_cast<int>(label) - 1;
}

inline BeatLabel anomaly_label(int index) {
    return static_cast<BeatLabel>(index + 1);
}

// Multichannel sampled waveform, row-major [n_samples x n_channels],
// physical units (mV).
struct SampledSignal {
    std::vector<double> data;
    int n_channels = 0;
    double fs = 0.0;

    SampledSignal() = default;
    SampledSignal(size_t n_samples, int channels, double sample_rate)
        : data(n_samples * channels, 0.0), n_channels(channels), fs(sample_rate) {}

    size_t n_samples() const {
        return n_channels > 0 ? data.size() / n_channels : 0;
    }
    double duration_s() const {
        return fs > 0 ? static_cast<double>(n_samples()) / fs : 0.0;
    }
    double& at(size_t sample, int channel) {
        return data[sample * n_channels + channel];
    }
    double at(size_t sample, int channel) const {
        return data[sample * n_channels + channel];
    }
};

enum class UnitKind : uint8_t { Beat = 0, Segment = 1 };

// One labeled slice of an assembled stream. Intervals tile the stream:
// interval k ends exactly where interval k+1 starts.
struct Interval {
    double start_s = 0.0;
    double end_s = 0.0;
    BeatLabel label = BeatLabel::Normal;
    UnitKind kind = UnitKind::Beat;
    uint32_t unit_id = 0;
};

struct LabeledStream {
    SampledSignal signal;
    std::vector<Interval> intervals;
};

} // namespace ecgres
