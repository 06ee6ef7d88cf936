#include "ecgres/dataset.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "ecgres/errors.hpp"
#include "ecgres/util.hpp"

namespace ecgres {

std::vector<Beat> segment_beats(const SampledSignal& signal,
                                const std::vector<wfdb::BeatAnnotation>& annotations,
                                const std::string& record_name) {
    std::vector<Beat> beats;
    const size_t n = signal.n_samples();
    for (size_t k = 0; k < annotations.size(); ++k) {
        if (annotations[k].sample_index >= n)
            throw Error(ErrorCode::Data, "annotation past end of record " + record_name);
        if (k + 1 < annotations.size() &&
            annotations[k + 1].sample_index <= annotations[k].sample_index)
            throw Error(ErrorCode::Data, "annotations not sorted in " + record_name);
        if (annotations[k].label == BeatLabel::Other)
            continue;
        size_t begin = k == 0 ? 0
                              : (annotations[k - 1].sample_index +
                                 annotations[k].sample_index) / 2;
        size_t end = k + 1 == annotations.size()
                         ? n
                         : (annotations[k].sample_index +
                            annotations[k + 1].sample_index) / 2;
        Beat beat;
        beat.record = record_name;
        beat.label = annotations[k].label;
        beat.span_begin = begin;
        beat.span_end = end;
        beat.samples = SampledSignal(end - begin, signal.n_channels, signal.fs);
        for (size_t i = begin; i < end; ++i)
            for (int ch = 0; ch < signal.n_channels; ++ch)
                beat.samples.at(i - begin, ch) = signal.at(i, ch);
        beats.push_back(std::move(beat));
    }
    return beats;
}

namespace {

// Sequential draws from a class pool: a fresh permutation per pass, so
// reuse only starts once the pool is exhausted.
class PoolDrawer {
public:
    PoolDrawer(std::vector<size_t> indices, std::mt19937_64& rng)
        : indices_(std::move(indices)), rng_(rng) {}

    size_t next() {
        if (pos_ == indices_.size()) {
            std::shuffle(indices_.begin(), indices_.end(), rng_);
            pos_ = 0;
        }
        return indices_[pos_++];
    }

private:
    std::vector<size_t> indices_;
    std::mt19937_64& rng_;
    size_t pos_ = indices_.size();
};

std::array<std::vector<size_t>, kNumAnomalies + 1>
pools_by_label(const std::vector<Beat>& pool) {
    std::array<std::vector<size_t>, kNumAnomalies + 1> by_label;
    for (size_t i = 0; i < pool.size(); ++i) {
        BeatLabel label = pool[i].label;
        if (label == BeatLabel::Other)
            continue;
        int slot = label == BeatLabel::Normal ? 0 : anomaly_index(label) + 1;
        by_label[slot].push_back(i);
    }
    return by_label;
}

// Concatenation with per-beat DC alignment: shift every appended beat so
// its first sample matches the running stream tail.
class StreamBuilder {
public:
    StreamBuilder(int n_channels, double fs) {
        stream_.signal.n_channels = n_channels;
        stream_.signal.fs = fs;
        tail_.assign(n_channels, 0.0);
    }

    void append(const Beat& beat, UnitKind kind, bool open_interval) {
        const auto& sig = beat.samples;
        const size_t n = sig.n_samples();
        const int ch_count = stream_.signal.n_channels;
        std::vector<double> offset(ch_count, 0.0);
        if (!first_)
            for (int ch = 0; ch < ch_count; ++ch)
                offset[ch] = tail_[ch] - sig.at(0, ch);
        for (size_t i = 0; i < n; ++i)
            for (int ch = 0; ch < ch_count; ++ch)
                stream_.signal.data.push_back(sig.at(i, ch) + offset[ch]);
        for (int ch = 0; ch < ch_count; ++ch)
            tail_[ch] = sig.at(n - 1, ch) + offset[ch];
        first_ = false;

        double fs = stream_.signal.fs;
        size_t end_sample = stream_.signal.n_samples();
        if (open_interval) {
            stream_.intervals.push_back({static_cast<double>(interval_start_) / fs,
                                         static_cast<double>(end_sample) / fs, beat.label,
                                         kind, next_unit_++});
        }
        interval_start_ = end_sample;
    }

    // begin a multi-beat unit: call before the first beat, close after the last
    void begin_unit() { unit_start_ = stream_.signal.n_samples(); }

    void close_unit(BeatLabel label, UnitKind kind) {
        double fs = stream_.signal.fs;
        stream_.intervals.push_back({static_cast<double>(unit_start_) / fs,
                                     static_cast<double>(stream_.signal.n_samples()) / fs,
                                     label, kind, next_unit_++});
        interval_start_ = stream_.signal.n_samples();
    }

    LabeledStream take() { return std::move(stream_); }

private:
    LabeledStream stream_;
    std::vector<double> tail_;
    bool first_ = true;
    size_t interval_start_ = 0;
    size_t unit_start_ = 0;
    uint32_t next_unit_ = 0;
};

} // namespace

LabeledStream assemble_training_stream(const std::vector<Beat>& pool,
                                       const TrainRecipe& recipe, uint64_t seed) {
    if (pool.empty())
        throw Error(ErrorCode::Data, "EmptyClassPool: no beats at all");
    auto by_label = pools_by_label(pool);

    std::array<size_t, kNumAnomalies + 1> want{};
    want[0] = recipe.normal_beats;
    for (int i = 1; i <= kNumAnomalies; ++i)
        want[i] = recipe.beats_per_anomaly;
    for (int slot = 0; slot <= kNumAnomalies; ++slot)
        if (want[slot] > 0 && by_label[slot].empty())
            throw Error(ErrorCode::Data,
                        std::string("EmptyClassPool: no beats labeled ") +
                            label_name(slot == 0 ? BeatLabel::Normal : anomaly_label(slot - 1)));

    std::mt19937_64 rng(mix_seed(seed, 0x7a21));
    std::vector<size_t> order;
    order.reserve(std::accumulate(want.begin(), want.end(), size_t{0}));
    for (int slot = 0; slot <= kNumAnomalies; ++slot) {
        PoolDrawer drawer(by_label[slot], rng);
        for (size_t i = 0; i < want[slot]; ++i)
            order.push_back(drawer.next());
    }
    std::shuffle(order.begin(), order.end(), rng);

    StreamBuilder builder(pool[0].samples.n_channels, pool[0].samples.fs);
    for (size_t idx : order)
        builder.append(pool[idx], UnitKind::Beat, true);
    return builder.take();
}

namespace {

struct SegmentCandidate {
    BeatLabel label = BeatLabel::Other;
    std::vector<size_t> beat_indices;  // contiguous, one record, one label
};

// Runs of contiguous same-label anomalous beats, carved into candidate
// segments of min..max beats.
std::vector<SegmentCandidate> carve_segments(const std::vector<Beat>& pool, int min_beats,
                                             int max_beats, std::mt19937_64& rng) {
    std::vector<SegmentCandidate> candidates;
    size_t i = 0;
    while (i < pool.size()) {
        const Beat& first = pool[i];
        size_t j = i;
        while (j + 1 < pool.size() && pool[j + 1].label == first.label &&
               pool[j + 1].record == first.record &&
               pool[j + 1].span_begin == pool[j].span_end)
            ++j;
        size_t run_len = j - i + 1;
        if (is_anomaly(first.label)) {
            size_t pos = i;
            size_t left = run_len;
            std::uniform_int_distribution<int> pick_len(min_beats, max_beats);
            while (left >= static_cast<size_t>(min_beats)) {
                size_t take = std::min<size_t>(pick_len(rng), left);
                if (left - take < static_cast<size_t>(min_beats) &&
                    left <= static_cast<size_t>(max_beats))
                    take = left;  // absorb the tail rather than waste it
                if (take < static_cast<size_t>(min_beats))
                    break;
                SegmentCandidate cand;
                cand.label = first.label;
                for (size_t b = pos; b < pos + take; ++b)
                    cand.beat_indices.push_back(b);
                candidates.push_back(std::move(cand));
                pos += take;
                left -= take;
            }
        }
        i = j + 1;
    }
    return candidates;
}

} // namespace

LabeledStream assemble_eval_stream(const std::vector<Beat>& pool, const EvalRecipe& recipe,
                                   uint64_t seed) {
    if (pool.empty())
        throw Error(ErrorCode::Data, "EmptyClassPool: no beats at all");
    std::mt19937_64 rng(mix_seed(seed, 0x5e6));

    auto candidates = carve_segments(pool, recipe.min_segment_beats,
                                     recipe.max_segment_beats, rng);
    std::array<std::vector<size_t>, kNumAnomalies> per_class;
    for (size_t c = 0; c < candidates.size(); ++c)
        per_class[anomaly_index(candidates[c].label)].push_back(c);

    std::vector<size_t> chosen;
    size_t anomalous_beats = 0;
    for (int cls = 0; cls < kNumAnomalies; ++cls) {
        int want = recipe.segments_per_class[cls];
        auto& avail = per_class[cls];
        if (static_cast<int>(avail.size()) < want)
            throw Error(ErrorCode::Data,
                        std::string("InsufficientSegments: ") +
                            label_name(anomaly_label(cls)) + " has " +
                            std::to_string(avail.size()) + " candidates, need " +
                            std::to_string(want));
        std::shuffle(avail.begin(), avail.end(), rng);
        for (int s = 0; s < want; ++s) {
            chosen.push_back(avail[s]);
            anomalous_beats += candidates[avail[s]].beat_indices.size();
        }
    }

    size_t normal_count = recipe.normal_beats_override
                              ? *recipe.normal_beats_override
                              : static_cast<size_t>(
                                    std::llround(recipe.normal_ratio *
                                                 static_cast<double>(anomalous_beats)));
    auto by_label = pools_by_label(pool);
    if (normal_count > 0 && by_label[0].empty())
        throw Error(ErrorCode::Data, "EmptyClassPool: no Normal beats");

    // unit list: segments are atomic, normal beats individual
    struct Unit {
        bool segment;
        size_t index;  // candidate index or beat index
    };
    std::vector<Unit> units;
    units.reserve(chosen.size() + normal_count);
    for (size_t c : chosen)
        units.push_back({true, c});
    PoolDrawer normals(by_label[0], rng);
    for (size_t i = 0; i < normal_count; ++i)
        units.push_back({false, normals.next()});
    std::shuffle(units.begin(), units.end(), rng);

    StreamBuilder builder(pool[0].samples.n_channels, pool[0].samples.fs);
    for (const Unit& unit : units) {
        if (unit.segment) {
            const auto& cand = candidates[unit.index];
            builder.begin_unit();
            for (size_t b : cand.beat_indices)
                builder.append(pool[b], UnitKind::Segment, false);
            builder.close_unit(cand.label, UnitKind::Segment);
        } else {
            builder.append(pool[unit.index], UnitKind::Beat, true);
        }
    }
    return builder.take();
}

RecordSplit split_records(std::vector<std::string> names, uint64_t seed, double train_frac,
                          double val_frac) {
    std::sort(names.begin(), names.end());
    std::mt19937_64 rng(mix_seed(seed, 0x59717));
    std::shuffle(names.begin(), names.end(), rng);
    RecordSplit split;
    size_t n = names.size();
    size_t n_train = static_cast<size_t>(std::llround(train_frac * n));
    size_t n_val = static_cast<size_t>(std::llround(val_frac * n));
    n_train = std::min(n_train, n);
    n_val = std::min(n_val, n - n_train);
    split.train.assign(names.begin(), names.begin() + n_train);
    split.validation.assign(names.begin() + n_train, names.begin() + n_train + n_val);
    split.test.assign(names.begin() + n_train + n_val, names.end());
    return split;
}

std::array<size_t, kNumAnomalies + 1> count_beats_per_label(const std::vector<Beat>& beats) {
    std::array<size_t, kNumAnomalies + 1> counts{};
    for (const auto& beat : beats) {
        if (beat.label == BeatLabel::Other)
            continue;
        int slot = beat.label == BeatLabel::Normal ? 0 : anomaly_index(beat.label) + 1;
        counts[slot]++;
    }
    return counts;
}

} // namespace ecgres
