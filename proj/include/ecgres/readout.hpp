#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ecgres/simulator.hpp"
#include "ecgres/types.hpp"

namespace ecgres {

struct FilterKernel {
    double tau_s = 0.175;
};

// Exponential spike traces of all neurons, sampled on a fixed grid.
// Row k holds sum over spikes s <= t_k of exp(-(t_k - s) / tau), t_k = k * period.
struct StateMatrix {
    Eigen::MatrixXd x;  // [n_rows x n_neurons]
    std::vector<double> times_s;
    double period_s = 0.0;
};

// Streaming evaluation of the exponential traces: feed spikes in time order,
// rows come out through the callback. Keeps O(n_neurons) state.
class ExpTraceSampler {
public:
    using RowFn = std::function<void(size_t row, double t, const Eigen::VectorXd& x)>;

    ExpTraceSampler(int n_neurons, FilterKernel kernel, double period_s, RowFn on_row);
    void feed(double t, uint32_t neuron);
    void finish(double duration_s);

private:
    void emit_rows_before(double t);

    double tau_;
    double period_;
    double decay_per_period_;
    RowFn on_row_;
    Eigen::VectorXd state_;     // trace values at the last emitted row
    Eigen::VectorXd incoming_;  // spike contributions referenced to the next row
    size_t next_row_ = 0;
    bool any_incoming_ = false;
};

StateMatrix filter_spikes(const SpikeRecord& record, int n_neurons, FilterKernel kernel,
                          double period_s);

// Per-anomaly binary targets: targets[i][k] = 1 iff row k's sample time lies
// inside an interval labeled with anomaly i.
std::array<std::vector<uint8_t>, kNumAnomalies>
build_targets(const std::vector<Interval>& intervals, const std::vector<double>& times_s);

// Accumulates the normal equations of the ridge problem without ever
// holding the full state matrix.
class RidgeAccumulator {
public:
    explicit RidgeAccumulator(int n_neurons, int block_rows = 2048);
    void add_row(const Eigen::VectorXd& x, const std::array<uint8_t, kNumAnomalies>& y);
    // Gram matrix and per-target right-hand sides seen so far.
    const Eigen::MatrixXd& gram();
    Eigen::MatrixXd rhs();  // [n_neurons x kNumAnomalies]
    size_t n_rows() const { return n_rows_; }

    // ridge < 0 selects the default scale: 1e-4 * trace(G) / n_neurons.
    Eigen::MatrixXd solve(double ridge);

private:
    void flush();

    int n_;
    int block_rows_;
    int fill_ = 0;
    size_t n_rows_ = 0;
    Eigen::MatrixXd block_;
    Eigen::MatrixXd block_y_;
    Eigen::MatrixXd gram_;
    Eigen::MatrixXd rhs_;
};

// w(i) = argmin |X w - y(i)|^2 + ridge |w|^2. ridge = 0 requires full
// column rank and throws a SingularSystem error otherwise; ridge < 0 uses
// the default scale (see RidgeAccumulator::solve).
Eigen::MatrixXd train_weights(const StateMatrix& state,
                              const std::array<std::vector<uint8_t>, kNumAnomalies>& targets,
                              double ridge);

struct ThresholdOutcome {
    double theta = 0.0;
    int missed_segments = 0;
    int false_beats = 0;
};

// Per unit: scan candidate thresholds over the unit's achieved scores and
// pick the one minimizing missed segments of its own label plus
// lambda_fp * normal beats with any supra-threshold sample. Ties resolve
// toward the larger threshold.
std::array<ThresholdOutcome, kNumAnomalies>
calibrate_thresholds(const Eigen::MatrixXd& scores, const std::vector<double>& times_s,
                     const std::vector<Interval>& intervals, double lambda_fp);

struct ReadoutModel {
    FilterKernel kernel;
    double sample_period_s = 1.0 / 360.0;
    Eigen::MatrixXd weights;  // [n_neurons x kNumAnomalies]
    std::array<double, kNumAnomalies> thresholds = {};
    bool calibrated = false;
    std::string provenance;  // free-form JSON object text

    int n_neurons() const { return static_cast<int>(weights.rows()); }
};

std::string model_to_json(const ReadoutModel& model);
ReadoutModel model_from_json(const std::string& text);

struct TriggerPoint {
    double time_s = 0.0;
    std::array<double, kNumAnomalies> scores = {};
    bool bit = false;
};

// bit = OR over units of (score > threshold); strict inequality.
TriggerPoint trigger(double time_s, const Eigen::VectorXd& x, const ReadoutModel& model);

} // namespace ecgres
