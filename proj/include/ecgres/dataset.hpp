#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ecgres/types.hpp"
#include "ecgres/wfdb.hpp"

namespace ecgres {

struct Beat {
    std::string record;
    BeatLabel label = BeatLabel::Other;
    SampledSignal samples;
    size_t span_begin = 0;  // sample indices into the source record
    size_t span_end = 0;
};

// One beat per in-scope annotation; beat k runs from the midpoint between
// annotations k-1 and k to the midpoint between k and k+1, clamped to the
// record bounds at the edges. Returns an empty list when nothing is in
// scope.
std::vector<Beat> segment_beats(const SampledSignal& signal,
                                const std::vector<wfdb::BeatAnnotation>& annotations,
                                const std::string& record_name);

struct TrainRecipe {
    size_t normal_beats = 22500;
    size_t beats_per_anomaly = 1500;
};

// Beats drawn at random per the recipe (cycling through reshuffled pools
// when a class runs out) and concatenated in shuffled order. Each appended
// beat is DC-shifted per channel so its first sample continues the previous
// one; the level-crossing encoder would otherwise fire on every seam.
LabeledStream assemble_training_stream(const std::vector<Beat>& pool,
                                       const TrainRecipe& recipe, uint64_t seed);

struct EvalRecipe {
    std::array<int, kNumAnomalies> segments_per_class = {0, 0, 0, 0, 0};
    int min_segment_beats = 5;
    int max_segment_beats = 10;
    // Normal beats per anomalous beat; 3.0 makes normals ~75% of the stream.
    double normal_ratio = 3.0;
    // When set, fixes the normal-beat count instead of normal_ratio.
    std::optional<size_t> normal_beats_override;
};

// Draws whole segments of 5..10 contiguous same-label beats (single record,
// single label) plus individual normal beats, shuffled and concatenated.
// Anomalous intervals carry unit_kind = segment, normal ones unit_kind = beat.
LabeledStream assemble_eval_stream(const std::vector<Beat>& pool, const EvalRecipe& recipe,
                                   uint64_t seed);

struct RecordSplit {
    std::vector<std::string> train;
    std::vector<std::string> validation;
    std::vector<std::string> test;
};

// Seeded record-level split; every record lands in exactly one subset.
RecordSplit split_records(std::vector<std::string> names, uint64_t seed,
                          double train_frac = 0.34, double val_frac = 0.33);

std::array<size_t, kNumAnomalies + 1> count_beats_per_label(const std::vector<Beat>& beats);

} // namespace ecgres
