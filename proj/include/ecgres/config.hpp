#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ecgres/dataset.hpp"
#include "ecgres/simulator.hpp"
#include "ecgres/synth.hpp"
#include "ecgres/topology.hpp"

namespace ecgres {

struct SplitConfig {
    uint64_t seed = 7;
    double train_frac = 0.34;
    double val_frac = 0.33;
    // Explicit record lists override the seeded split when non-empty.
    std::vector<std::string> train_records;
    std::vector<std::string> val_records;
    std::vector<std::string> test_records;

    bool explicit_lists() const {
        return !train_records.empty() || !val_records.empty() || !test_records.empty();
    }
};

struct DatasetConfig {
    size_t train_beats = 30000;  // 75% normal, 5% per anomaly
    uint64_t train_seed = 101;
    uint64_t val_seed = 102;
    uint64_t test_seed = 103;
    std::array<int, kNumAnomalies> val_segments = {24, 22, 22, 21, 22};
    std::array<int, kNumAnomalies> test_segments = {15, 17, 14, 16, 14};
};

struct EncoderStageConfig {
    double target_rate_per_channel = 400.0;  // up + down events
    double refractory_s = 0.0;
    double calibrate_tol = 0.05;
    double calibrate_seconds = 60.0;  // slice of the training stream used
};

struct TuneStageConfig {
    TuneConfig search;
    double sample_seconds = 12.0;
};

struct ReadoutStageConfig {
    double tau_out_s = 0.175;
    double sample_period_s = 1.0 / 360.0;
    // Training rows are taken every train_subsample-th state sample; scoring
    // and evaluation always run on the full grid.
    int train_subsample = 8;
    double ridge = -1.0;  // negative: default scale 1e-4 * tr(G)/N
    double lambda_fp = 1.0;
};

struct ExperimentConfig {
    std::string records_dir = "records";
    std::string out_dir = "out";
    SplitConfig split;
    DatasetConfig dataset;
    EncoderStageConfig encoder;
    TopologyConfig topology;       // seed/mode from config file
    double mismatch_cv = 0.2;
    uint64_t mismatch_seed = 13;
    SimConfig sim;
    PopulationParamSet neuron_params;
    WeightTable base_weights;
    TuneStageConfig tune;
    ReadoutStageConfig readout;
    SynthConfig synth;

    static ExperimentConfig from_json_text(const std::string& text);
    static ExperimentConfig from_file(const std::string& path);
    std::string to_json_text() const;  // canonical form, all fields present
    std::string config_hash() const;

    // Dotted-path override, value parsed as JSON (bare words fall back to
    // strings): e.g. set("dataset.train_beats", "2000").
    void set(const std::string& dotted_key, const std::string& value);
};

// CI-scale preset: 3 synthetic records, 2000 training beats, 2 eval
// segments per class, coarser simulation step.
void apply_mini_preset(ExperimentConfig& cfg);

WeightTable default_base_weights();

} // namespace ecgres
