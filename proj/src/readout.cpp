#include "ecgres/readout.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "ecgres/errors.hpp"

using nlohmann::json;

namespace ecgres {

ExpTraceSampler::ExpTraceSampler(int n_neurons, FilterKernel kernel, double period_s,
                                 RowFn on_row)
    : tau_(kernel.tau_s), period_(period_s), on_row_(std::move(on_row)) {
    if (!(tau_ > 0.0))
        throw Error(ErrorCode::Config, "InvalidConfig: kernel tau must be positive");
    if (!(period_ > 0.0))
        throw Error(ErrorCode::Config, "InvalidConfig: sample period must be positive");
    decay_per_period_ = std::exp(-period_ / tau_);
    state_ = Eigen::VectorXd::Zero(n_neurons);
    incoming_ = Eigen::VectorXd::Zero(n_neurons);
}

void ExpTraceSampler::emit_rows_before(double t) {
    while (static_cast<double>(next_row_) * period_ < t) {
        double row_time = static_cast<double>(next_row_) * period_;
        if (next_row_ > 0)
            state_ *= decay_per_period_;
        if (any_incoming_) {
            state_ += incoming_;
            incoming_.setZero();
            any_incoming_ = false;
        }
        on_row_(next_row_, row_time, state_);
        ++next_row_;
    }
}

void ExpTraceSampler::feed(double t, uint32_t neuron) {
    emit_rows_before(t);
    // contribution referenced to the upcoming row time
    double next_time = static_cast<double>(next_row_) * period_;
    incoming_[neuron] += std::exp(-(next_time - t) / tau_);
    any_incoming_ = true;
}

void ExpTraceSampler::finish(double duration_s) {
    // emit every row with sample time <= duration
    emit_rows_before(std::nextafter(duration_s, duration_s + 1.0));
}

StateMatrix filter_spikes(const SpikeRecord& record, int n_neurons, FilterKernel kernel,
                          double period_s) {
    StateMatrix out;
    out.period_s = period_s;
    size_t n_rows = static_cast<size_t>(std::floor(record.duration_s / period_s)) + 1;
    out.x.resize(n_rows, n_neurons);
    out.times_s.resize(n_rows);
    ExpTraceSampler sampler(n_neurons, kernel, period_s,
                            [&](size_t row, double t, const Eigen::VectorXd& x) {
                                out.x.row(row) = x.transpose();
                                out.times_s[row] = t;
                            });
    for (const auto& spike : record.spikes)
        sampler.feed(spike.time_s, spike.neuron);
    sampler.finish(record.duration_s);
    return out;
}

std::array<std::vector<uint8_t>, kNumAnomalies>
build_targets(const std::vector<Interval>& intervals, const std::vector<double>& times_s) {
    std::array<std::vector<uint8_t>, kNumAnomalies> targets;
    for (auto& t : targets)
        t.assign(times_s.size(), 0);
    size_t iv = 0;
    for (size_t k = 0; k < times_s.size(); ++k) {
        double t = times_s[k];
        while (iv < intervals.size() && intervals[iv].end_s <= t)
            ++iv;
        if (iv >= intervals.size())
            break;
        const Interval& interval = intervals[iv];
        if (t >= interval.start_s && is_anomaly(interval.label))
            targets[anomaly_index(interval.label)][k] = 1;
    }
    return targets;
}

RidgeAccumulator::RidgeAccumulator(int n_neurons, int block_rows)
    : n_(n_neurons), block_rows_(block_rows) {
    block_.resize(block_rows_, n_);
    block_y_.resize(block_rows_, kNumAnomalies);
    gram_ = Eigen::MatrixXd::Zero(n_, n_);
    rhs_ = Eigen::MatrixXd::Zero(n_, kNumAnomalies);
}

void RidgeAccumulator::add_row(const Eigen::VectorXd& x,
                               const std::array<uint8_t, kNumAnomalies>& y) {
    block_.row(fill_) = x.transpose();
    for (int i = 0; i < kNumAnomalies; ++i)
        block_y_(fill_, i) = y[i];
    ++fill_;
    ++n_rows_;
    if (fill_ == block_rows_)
        flush();
}

void RidgeAccumulator::flush() {
    if (fill_ == 0)
        return;
    auto rows = block_.topRows(fill_);
    gram_.selfadjointView<Eigen::Lower>().rankUpdate(rows.transpose());
    rhs_.noalias() += rows.transpose() * block_y_.topRows(fill_);
    fill_ = 0;
}

const Eigen::MatrixXd& RidgeAccumulator::gram() {
    flush();
    gram_ = gram_.selfadjointView<Eigen::Lower>();
    return gram_;
}

Eigen::MatrixXd RidgeAccumulator::rhs() {
    flush();
    return rhs_;
}

Eigen::MatrixXd RidgeAccumulator::solve(double ridge) {
    const Eigen::MatrixXd& g = gram();
    Eigen::MatrixXd b = rhs();
    if (ridge < 0.0)
        ridge = 1e-4 * g.trace() / n_;
    Eigen::MatrixXd reg = g;
    if (ridge > 0.0)
        reg.diagonal().array() += ridge;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(reg);
    Eigen::MatrixXd w = ldlt.solve(b);
    if (!w.allFinite())
        throw Error(ErrorCode::Numeric, "SingularSystem: normal equations not solvable");
    if (ridge == 0.0) {
        // rank-deficient Gram matrices can still produce finite garbage
        double scale = g.norm() * b.norm() + 1e-300;
        double residual = (g * w - b).norm();
        if (residual > 1e-8 * scale + 1e-12)
            throw Error(ErrorCode::Numeric, "SingularSystem: rank-deficient state matrix");
    }
    return w;
}

Eigen::MatrixXd train_weights(const StateMatrix& state,
                              const std::array<std::vector<uint8_t>, kNumAnomalies>& targets,
                              double ridge) {
    RidgeAccumulator acc(static_cast<int>(state.x.cols()));
    std::array<uint8_t, kNumAnomalies> y;
    for (Eigen::Index r = 0; r < state.x.rows(); ++r) {
        for (int i = 0; i < kNumAnomalies; ++i)
            y[i] = targets[i][static_cast<size_t>(r)];
        acc.add_row(state.x.row(r).transpose(), y);
    }
    return acc.solve(ridge);
}

std::array<ThresholdOutcome, kNumAnomalies>
calibrate_thresholds(const Eigen::MatrixXd& scores, const std::vector<double>& times_s,
                     const std::vector<Interval>& intervals, double lambda_fp) {
    if (scores.rows() != static_cast<Eigen::Index>(times_s.size()))
        throw Error(ErrorCode::Config, "scores and sample times disagree");

    std::array<ThresholdOutcome, kNumAnomalies> out;
    for (int unit = 0; unit < kNumAnomalies; ++unit) {
        const auto col = scores.col(unit);
        if (col.size() == 0 || col.maxCoeff() == col.minCoeff())
            throw Error(ErrorCode::Numeric,
                        "DegenerateScores: unit " + std::to_string(unit) +
                            " produced a constant score");

        // per-interval score maxima for this unit
        std::vector<double> own_segment_max;
        std::vector<double> normal_beat_max;
        size_t k = 0;
        for (const auto& interval : intervals) {
            while (k < times_s.size() && times_s[k] < interval.start_s)
                ++k;
            double peak = -std::numeric_limits<double>::infinity();
            size_t j = k;
            while (j < times_s.size() && times_s[j] < interval.end_s) {
                peak = std::max(peak, col[static_cast<Eigen::Index>(j)]);
                ++j;
            }
            k = j;
            if (peak == -std::numeric_limits<double>::infinity())
                continue;  // interval had no sample
            if (interval.label == anomaly_label(unit))
                own_segment_max.push_back(peak);
            else if (interval.label == BeatLabel::Normal)
                normal_beat_max.push_back(peak);
        }
        std::sort(own_segment_max.begin(), own_segment_max.end());
        std::sort(normal_beat_max.begin(), normal_beat_max.end());

        std::vector<double> candidates(col.data(), col.data() + col.size());
        std::sort(candidates.begin(), candidates.end());
        candidates.erase(std::unique(candidates.begin(), candidates.end()),
                         candidates.end());

        double best_cost = std::numeric_limits<double>::infinity();
        ThresholdOutcome best;
        for (double theta : candidates) {
            // segment missed when its peak is <= theta (detection is strict >)
            auto missed = std::upper_bound(own_segment_max.begin(), own_segment_max.end(),
                                           theta) -
                          own_segment_max.begin();
            auto false_beats = normal_beat_max.end() -
                               std::upper_bound(normal_beat_max.begin(),
                                                normal_beat_max.end(), theta);
            double cost = static_cast<double>(missed) +
                          lambda_fp * static_cast<double>(false_beats);
            if (cost < best_cost || (cost == best_cost && theta > best.theta)) {
                best_cost = cost;
                best.theta = theta;
                best.missed_segments = static_cast<int>(missed);
                best.false_beats = static_cast<int>(false_beats);
            }
        }
        out[unit] = best;
    }
    return out;
}

std::string model_to_json(const ReadoutModel& model) {
    json j;
    j["version"] = 1;
    j["tau_out_s"] = model.kernel.tau_s;
    j["sample_period_s"] = model.sample_period_s;
    j["calibrated"] = model.calibrated;
    j["n_neurons"] = model.n_neurons();
    json w = json::array();
    for (int i = 0; i < kNumAnomalies; ++i) {
        json col = json::array();
        for (Eigen::Index r = 0; r < model.weights.rows(); ++r)
            col.push_back(model.weights(r, i));
        w.push_back(std::move(col));
    }
    j["weights"] = std::move(w);
    json th = json::array();
    for (double t : model.thresholds)
        th.push_back(t);
    j["thresholds"] = std::move(th);
    if (!model.provenance.empty())
        j["provenance"] = json::parse(model.provenance);
    return j.dump();
}

ReadoutModel model_from_json(const std::string& text) {
    json j = json::parse(text);
    if (j.value("version", 0) != 1)
        throw Error(ErrorCode::Format, "unknown model file version");
    ReadoutModel model;
    model.kernel.tau_s = j.at("tau_out_s");
    model.sample_period_s = j.at("sample_period_s");
    model.calibrated = j.value("calibrated", false);
    int n = j.at("n_neurons");
    model.weights.resize(n, kNumAnomalies);
    const auto& w = j.at("weights");
    for (int i = 0; i < kNumAnomalies; ++i)
        for (int r = 0; r < n; ++r)
            model.weights(r, i) = w.at(i).at(r);
    const auto& th = j.at("thresholds");
    for (int i = 0; i < kNumAnomalies; ++i)
        model.thresholds[i] = th.at(i);
    if (j.contains("provenance"))
        model.provenance = j.at("provenance").dump();
    return model;
}

TriggerPoint trigger(double time_s, const Eigen::VectorXd& x, const ReadoutModel& model) {
    TriggerPoint point;
    point.time_s = time_s;
    for (int i = 0; i < kNumAnomalies; ++i) {
        point.scores[i] = model.weights.col(i).dot(x);
        if (point.scores[i] > model.thresholds[i])
            point.bit = true;
    }
    return point;
}

} // namespace ecgres
