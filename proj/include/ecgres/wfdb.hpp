#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ecgres/types.hpp"

namespace ecgres::wfdb {

struct ChannelSpec {
    std::string file;
    int format = 212;
    double gain = 200.0;       // ADC units per mV
    int baseline = 0;          // ADC value of 0 mV
    int adc_res = 12;
    int adc_zero = 0;
    int init_value = 0;
    int checksum = 0;
    bool has_checksum = false;
    std::string description;
};

struct RecordHeader {
    std::string record_name;
    int n_channels = 0;
    double fs = 0.0;
    size_t n_samples = 0;
    std::vector<ChannelSpec> channels;
};

struct BeatAnnotation {
    size_t sample_index = 0;
    BeatLabel label = BeatLabel::Other;
};

// Header (.hea) text. Throws Error(Format) with a MalformedHeader /
// UnsupportedFormat message on bad input. Only signal format 212 is
// accepted.
RecordHeader parse_header(std::string_view text);

// Raw 12-bit two's-complement sample stream of a format-212 .dat file,
// channel-interleaved, before any unit conversion.
std::vector<int16_t> unpack_212(std::span<const uint8_t> bytes, size_t n_values);

// Full signal in physical units: (adc - baseline) / gain per channel.
SampledSignal parse_signal_212(std::span<const uint8_t> bytes, const RecordHeader& header);

// Beat annotations from a MIT-format .atr byte stream. Non-beat annotations
// (rhythm changes, quality notes, pseudo-annotations) are consumed but not
// returned. Beat type codes outside the six in-scope classes map to Other.
std::vector<BeatAnnotation> parse_annotations(std::span<const uint8_t> bytes);

struct Record {
    RecordHeader header;
    SampledSignal signal;
    std::vector<BeatAnnotation> beats;
};

// Loads <dir>/<name>.hea, .dat and .atr.
Record load_record(const std::string& dir, const std::string& name);

// Record names listed in <dir>/RECORDS, or all *.hea stems if absent.
std::vector<std::string> list_records(const std::string& dir);

// MIT annotation type codes for the in-scope beat classes.
inline constexpr int kCodeNormal = 1;
inline constexpr int kCodeLbbb = 2;
inline constexpr int kCodeRbbb = 3;
inline constexpr int kCodePvc = 5;
inline constexpr int kCodeApb = 8;
inline constexpr int kCodePaced = 12;

bool is_beat_code(int code);
BeatLabel label_from_code(int code);

} // namespace ecgres::wfdb
