#include "ecgres/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "ecgres/errors.hpp"
#include "ecgres/util.hpp"
#include "ecgres/wfdb_write.hpp"

namespace ecgres {

namespace {

struct Bump {
    double center_s;  // relative to the R peak
    double amp_mv;    // channel 1
    double width_s;
    double ch2_factor;
};

struct BeatShape {
    std::vector<Bump> bumps;
    double rr_s;
};

BeatShape shape_for(BeatLabel label) {
    switch (label) {
    case BeatLabel::Normal:
        return {{{-0.170, 0.12, 0.022, 0.55},
                 {-0.028, -0.12, 0.010, 0.45},
                 {0.000, 1.25, 0.013, 0.50},
                 {0.030, -0.28, 0.011, 0.60},
                 {0.240, 0.36, 0.060, 0.50}},
                0.80};
    case BeatLabel::Lbbb:  // broad notched QRS, discordant T
        return {{{-0.170, 0.10, 0.022, 0.55},
                 {-0.012, 0.85, 0.028, -0.45},
                 {0.038, 0.62, 0.030, -0.40},
                 {0.270, -0.32, 0.070, 0.55}},
                0.85};
    case BeatLabel::Rbbb:  // rSR' with deep S
        return {{{-0.170, 0.11, 0.022, 0.55},
                 {-0.012, 0.70, 0.012, 0.85},
                 {0.020, -0.48, 0.014, 0.70},
                 {0.056, 0.92, 0.022, 0.90},
                 {0.250, 0.25, 0.060, 0.40}},
                0.82};
    case BeatLabel::Pvc:  // premature, wide and tall, no P, inverted T
        return {{{0.000, 1.70, 0.042, -0.70},
                 {0.062, -0.52, 0.030, -0.55},
                 {0.300, -0.45, 0.080, 0.60}},
                0.62};
    case BeatLabel::Paced:  // stimulus spike then broad ventricular complex
        return {{{-0.060, 0.90, 0.0022, 0.95},
                 {0.000, 1.10, 0.035, 0.60},
                 {0.280, -0.30, 0.070, 0.55}},
                0.86};
    case BeatLabel::Apb:  // early, narrow, remodeled P
        return {{{-0.120, 0.16, 0.014, 0.65},
                 {0.000, 1.05, 0.013, 0.50},
                 {0.026, -0.22, 0.011, 0.55},
                 {0.215, 0.30, 0.055, 0.50}},
                0.66};
    default:
        throw Error(ErrorCode::Config, "no synthetic shape for label Other");
    }
}

constexpr double kRPhase = 0.38;  // R-peak position within the beat

void render_beat(const BeatShape& shape, double rr_s, double fs, double amp_scale,
                 double noise_mv, std::mt19937_64& rng, std::vector<double>& out_interleaved) {
    size_t n = static_cast<size_t>(std::llround(rr_s * fs));
    std::normal_distribution<double> noise(0.0, noise_mv);
    double r_time = kRPhase * rr_s;
    for (size_t i = 0; i < n; ++i) {
        double t = static_cast<double>(i) / fs - r_time;
        double v1 = 0.0, v2 = 0.0;
        for (const auto& bump : shape.bumps) {
            double arg = (t - bump.center_s) / bump.width_s;
            double g = std::exp(-0.5 * arg * arg) * bump.amp_mv * amp_scale;
            v1 += g;
            v2 += g * bump.ch2_factor;
        }
        out_interleaved.push_back(v1 + noise(rng));
        out_interleaved.push_back(v2 + noise(rng));
    }
}

int annotation_code(BeatLabel label) {
    switch (label) {
    case BeatLabel::Normal: return wfdb::kCodeNormal;
    case BeatLabel::Lbbb: return wfdb::kCodeLbbb;
    case BeatLabel::Rbbb: return wfdb::kCodeRbbb;
    case BeatLabel::Pvc: return wfdb::kCodePvc;
    case BeatLabel::Paced: return wfdb::kCodePaced;
    case BeatLabel::Apb: return wfdb::kCodeApb;
    default: return 13;
    }
}

} // namespace

SampledSignal synth_beat(BeatLabel label, double rr_s, double fs, uint64_t seed) {
    std::mt19937_64 rng(mix_seed(seed, 0xbea7));
    BeatShape shape = shape_for(label);
    std::vector<double> data;
    render_beat(shape, rr_s, fs, 1.0, 0.0, rng, data);
    SampledSignal signal;
    signal.data = std::move(data);
    signal.n_channels = 2;
    signal.fs = fs;
    return signal;
}

std::vector<std::string> synth_records(const SynthConfig& cfg, const std::string& out_dir) {
    if (cfg.n_records <= 0)
        throw Error(ErrorCode::Config, "InvalidConfig: need at least one record");
    ensure_dir(out_dir);

    std::vector<std::string> names;
    std::string records_index;
    for (int rec = 0; rec < cfg.n_records; ++rec) {
        char name[16];
        std::snprintf(name, sizeof(name), "s%02d", rec);
        names.push_back(name);
        records_index += name;
        records_index += "\n";

        std::mt19937_64 rng(mix_seed(cfg.seed, 0x9ec0 + rec));
        std::uniform_int_distribution<int> run_len(cfg.run_min_beats, cfg.run_max_beats);
        std::uniform_int_distribution<int> normal_len(cfg.normal_run_min, cfg.normal_run_max);
        std::uniform_real_distribution<double> rr_jitter(0.95, 1.05);
        std::lognormal_distribution<double> amp_jitter(0.0, 0.06);

        std::array<BeatLabel, kNumAnomalies> classes = {
            BeatLabel::Lbbb, BeatLabel::Rbbb, BeatLabel::Pvc, BeatLabel::Paced,
            BeatLabel::Apb};
        std::shuffle(classes.begin(), classes.end(), rng);

        // label plan: normal run / anomaly run alternation
        std::vector<std::pair<BeatLabel, int>> runs;
        for (int pass = 0; pass < cfg.runs_per_class; ++pass) {
            for (BeatLabel cls : classes) {
                runs.push_back({BeatLabel::Normal, normal_len(rng)});
                runs.push_back({cls, run_len(rng)});
            }
        }
        runs.push_back({BeatLabel::Normal, normal_len(rng)});

        std::vector<double> interleaved;
        std::vector<wfdb::AnnotationEntry> annotations;
        for (const auto& [label, count] : runs) {
            BeatShape shape = shape_for(label);
            // a rhythm-change marker ahead of each run; parsers must skip it
            size_t run_start = interleaved.size() / 2;
            if (run_start > 4)
                annotations.push_back({run_start - 4, 28});
            for (int b = 0; b < count; ++b) {
                double rr = shape.rr_s * rr_jitter(rng);
                size_t beat_start = interleaved.size() / 2;
                render_beat(shape, rr, cfg.fs, amp_jitter(rng), cfg.noise_mv, rng,
                            interleaved);
                size_t r_sample = beat_start +
                                  static_cast<size_t>(std::llround(kRPhase * rr * cfg.fs));
                annotations.push_back({r_sample, annotation_code(label)});
            }
        }

        size_t n_samples = interleaved.size() / 2;
        std::vector<int16_t> digital(interleaved.size());
        for (size_t i = 0; i < interleaved.size(); ++i) {
            long long adc = std::llround(interleaved[i] * cfg.gain) + cfg.adc_baseline;
            digital[i] = static_cast<int16_t>(std::clamp<long long>(adc, 0, 2047));
        }

        wfdb::RecordHeader header;
        header.record_name = name;
        header.n_channels = 2;
        header.fs = cfg.fs;
        header.n_samples = n_samples;
        for (int ch = 0; ch < 2; ++ch) {
            wfdb::ChannelSpec spec;
            spec.file = std::string(name) + ".dat";
            spec.format = 212;
            spec.gain = cfg.gain;
            spec.baseline = cfg.adc_baseline;
            spec.adc_res = 11;
            spec.adc_zero = cfg.adc_baseline;
            spec.description = ch == 0 ? "MLII" : "V5";
            header.channels.push_back(std::move(spec));
        }
        wfdb::write_record(out_dir, header, digital, annotations);
    }
    write_text_file_atomic(out_dir + "/RECORDS", records_index);
    return names;
}

} // namespace ecgres
