#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ecgres/types.hpp"

namespace ecgres {

// Synthetic two-channel ECG records in MIT-BIH layout (360 Hz, format 212,
// MIT annotation files). Morphologies are Gaussian-bump composites with a
// distinct shape per beat class; anomalous beats appear in contiguous
// same-label runs so evaluation segments can be carved out downstream.
struct SynthConfig {
    int n_records = 9;
    uint64_t seed = 5;
    int runs_per_class = 8;    // anomalous runs per class per record
    int run_min_beats = 5;
    int run_max_beats = 12;
    int normal_run_min = 3;
    int normal_run_max = 8;
    double fs = 360.0;
    double gain = 200.0;       // ADC units per mV
    int adc_baseline = 1024;
    double noise_mv = 0.008;
};

// Single beat waveform of one class, R peak at 0.38 * rr_s.
SampledSignal synth_beat(BeatLabel label, double rr_s, double fs, uint64_t seed);

// Writes .hea/.dat/.atr per record plus a RECORDS index; returns the names.
std::vector<std::string> synth_records(const SynthConfig& cfg, const std::string& out_dir);

} // namespace ecgres
