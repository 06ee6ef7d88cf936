#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ecgres {

enum class SynapseType : uint8_t { ExcFast = 0, ExcSlow = 1, InhFast = 2, InhSlow = 3 };
enum class Population : uint8_t { InputExpansion = 0, Excitatory = 1, Inhibitory = 2 };

const char* synapse_type_name(SynapseType type);
const char* population_name(Population pop);

enum class TopologyMode : uint8_t { Free = 0, HardwareFidelity = 1 };

struct TopologyConfig {
    int n_input_lines = 4;  // ch0-up, ch0-down, ch1-up, ch1-down
    int n_input = 128;
    int n_exc = 512;
    int n_inh = 128;
    int fanin_input_to_exc = 16;
    int fanin_exc_to_exc = 32;
    int fanin_inh_to_exc = 16;
    int fanin_exc_to_inh = 64;
    int input_syn_min = 1;
    int input_syn_max = 64;
    int max_distinct_sources = 64;  // per-neuron subscription cap, hardware-fidelity mode
    TopologyMode mode = TopologyMode::Free;
    uint64_t seed = 0;
};

// A coalesced bundle of synapses: `multiplicity` parallel connections of one
// type between one (pre, post) pair.
struct Edge {
    uint32_t pre = 0;
    uint32_t post = 0;
    SynapseType type = SynapseType::ExcFast;
    uint16_t multiplicity = 1;
};

// Input-expansion neurons each listen to exactly one input line through
// 1..64 parallel synapses.
struct InputTap {
    uint32_t line = 0;
    uint16_t n_synapses = 1;
};

struct NetworkTopology {
    TopologyConfig cfg;
    std::vector<InputTap> input_map;  // [n_input]
    std::vector<Edge> edges;

    int n_neurons() const { return cfg.n_input + cfg.n_exc + cfg.n_inh; }
    uint32_t input_begin() const { return 0; }
    uint32_t exc_begin() const { return static_cast<uint32_t>(cfg.n_input); }
    uint32_t inh_begin() const { return static_cast<uint32_t>(cfg.n_input + cfg.n_exc); }

    Population population_of(uint32_t id) const {
        if (id < exc_begin())
            return Population::InputExpansion;
        if (id < inh_begin())
            return Population::Excitatory;
        return Population::Inhibitory;
    }
};

NetworkTopology build_topology(const TopologyConfig& cfg);

// Throws Error(Data) if any structural invariant is broken.
void validate_topology(const NetworkTopology& topology);

struct PathwayStats {
    double mean_in_degree = 0.0;  // synapses per post neuron, multiplicity counted
    double density = 0.0;         // mean_in_degree / |pre population|
};

struct ConnectivityReport {
    PathwayStats input_to_exc;
    PathwayStats exc_to_exc;
    PathwayStats exc_to_inh;
    PathwayStats inh_to_exc;
    int max_distinct_sources = 0;  // over all neurons
};

ConnectivityReport connectivity_report(const NetworkTopology& topology);
std::string connectivity_report_text(const ConnectivityReport& report);

std::string topology_to_json(const NetworkTopology& topology);
NetworkTopology topology_from_json(const std::string& text);

} // namespace ecgres
