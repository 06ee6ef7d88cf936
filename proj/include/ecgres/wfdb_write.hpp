#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ecgres/wfdb.hpp"

namespace ecgres::wfdb {

// Minimal format-212 record writer. Exists for fixture generation and the
// synthetic-record tool; reading real databases never goes through it.

std::string format_header(const RecordHeader& header);

// Packs channel-interleaved 12-bit samples (values in [-2048, 2047]).
std::vector<uint8_t> pack_212(const std::vector<int16_t>& samples);

struct AnnotationEntry {
    size_t sample_index = 0;
    int code = 0;  // MIT annotation type code, beat or non-beat
};

std::vector<uint8_t> format_annotations(const std::vector<AnnotationEntry>& entries);

// Writes <dir>/<name>.hea, .dat, .atr. Digital samples are
// channel-interleaved ADC values matching the header's gain/baseline.
void write_record(const std::string& dir, const RecordHeader& header,
                  const std::vector<int16_t>& digital,
                  const std::vector<AnnotationEntry>& annotations);

} // namespace ecgres::wfdb
