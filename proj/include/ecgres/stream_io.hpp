#pragma once

#include <string>
#include <vector>

#include "ecgres/types.hpp"

namespace ecgres {

// Stream signal file: "ECGS" magic, u32 version, u32 n_channels, f64 fs,
// u64 n_samples, then row-major f64 samples, all little-endian.
void write_signal(const std::string& path, const SampledSignal& signal);
SampledSignal read_signal(const std::string& path);

// Interval index: CSV with header start_s,end_s,label,unit_kind,unit_id.
void write_intervals(const std::string& path, const std::vector<Interval>& intervals);
std::vector<Interval> read_intervals(const std::string& path);

} // namespace ecgres
