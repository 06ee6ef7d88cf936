#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ecgres/events.hpp"
#include "ecgres/topology.hpp"

namespace ecgres {

struct NeuronParams {
    double tau_mem_s = 0.020;
    std::array<double, 4> tau_syn_s = {0.010, 0.100, 0.010, 0.100};  // per SynapseType
    double v_thresh = 1.0;
    double v_reset = 0.0;
    double refractory_s = 0.002;
};

// One base parameter set per population, standing in for per-core bias
// settings.
struct PopulationParamSet {
    NeuronParams input_expansion;
    NeuronParams excitatory;
    NeuronParams inhibitory;

    const NeuronParams& of(Population pop) const {
        switch (pop) {
        case Population::InputExpansion: return input_expansion;
        case Population::Excitatory: return excitatory;
        default: return inhibitory;
        }
    }
};

// Per-neuron parameters after mismatch injection.
struct NeuronParamArrays {
    std::vector<double> tau_mem_s;
    std::array<std::vector<double>, 4> tau_syn_s;
    std::vector<double> v_thresh;
    std::vector<double> v_reset;
    std::vector<double> refractory_s;

    size_t size() const { return tau_mem_s.size(); }
};

// Multiplies every parameter of every neuron by an independent log-normal
// draw with unit median and coefficient of variation cv. cv = 0 reproduces
// the base parameters exactly.
NeuronParamArrays inject_mismatch(const PopulationParamSet& base,
                                  const NetworkTopology& topology, double cv,
                                  uint64_t seed);

// Synaptic efficacy shared per (post population, synapse type); multiple
// connections between a pair multiply it.
struct WeightTable {
    // [population][synapse type]
    std::array<std::array<double, 4>, 3> w = {};

    double& at(Population pop, SynapseType type) {
        return w[static_cast<int>(pop)][static_cast<int>(type)];
    }
    double at(Population pop, SynapseType type) const {
        return w[static_cast<int>(pop)][static_cast<int>(type)];
    }
};

std::string weights_to_json(const WeightTable& table);
WeightTable weights_from_json(const std::string& text);

struct SimConfig {
    double dt_s = 1e-4;
    // Sustained per-neuron rate (spikes within any one-second window) that
    // aborts the run as runaway excitation.
    double max_rate_hz = 300.0;
    bool enable_spiking = true;  // off: pure subthreshold integration
};

struct Spike {
    double time_s = 0.0;
    uint32_t neuron = 0;
};

struct SpikeRecord {
    std::vector<Spike> spikes;
    double duration_s = 0.0;
};

using SpikeSink = std::function<void(double time_s, uint32_t neuron)>;

// Records the membrane potential of selected neurons at every step.
struct VoltageProbe {
    std::vector<uint32_t> neurons;
    std::vector<double> times_s;
    std::vector<std::vector<double>> traces;  // [neuron][step]
};

// Fixed-step integration with exact per-step exponential decay. Events are
// applied within the step containing their timestamp; spikes are delivered
// to their targets in the following step.
void simulate_stream(const NetworkTopology& topology, const NeuronParamArrays& params,
                     const WeightTable& weights, const EventTrain& input,
                     double duration_s, const SimConfig& cfg, const SpikeSink& sink,
                     VoltageProbe* probe = nullptr);

SpikeRecord simulate(const NetworkTopology& topology, const NeuronParamArrays& params,
                     const WeightTable& weights, const EventTrain& input,
                     const SimConfig& cfg, VoltageProbe* probe = nullptr);

struct RateSeries {
    double window_s = 0.0;
    std::vector<double> window_start_s;
    // mean rate per neuron (Hz) for each population, per window
    std::vector<std::array<double, 3>> rate_hz;
};

RateSeries rate_report(const SpikeRecord& record, const NetworkTopology& topology,
                       double window_s);

struct TuneConfig {
    double rate_lo_hz = 5.0;    // target band for mean excitatory rate
    double rate_hi_hz = 20.0;
    double silence_s = 2.5;     // appended after the sample input
    double decay_check_at_s = 1.0;
    double decay_window_s = 0.5;
    double decay_max_hz = 1.0;
    int max_weight_steps = 48;
};

// Scales the excitatory and inhibitory weight magnitudes until the mean
// excitatory rate during stimulation sits inside the target band and
// activity dies out once input stops. Returns the base table untouched if
// it already satisfies both criteria.
WeightTable tune_weights(const NetworkTopology& topology, const NeuronParamArrays& params,
                         const WeightTable& base, const EventTrain& sample,
                         const SimConfig& sim_cfg, const TuneConfig& tune_cfg);

} // namespace ecgres
