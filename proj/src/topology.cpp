#include "ecgres/topology.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <random>
#include <set>
#include <unordered_set>

#include <json.hpp>

#include "ecgres/errors.hpp"
#include "ecgres/util.hpp"

using nlohmann::json;

namespace ecgres {

const char* synapse_type_name(SynapseType type) {
    switch (type) {
    case SynapseType::ExcFast: return "exc_fast";
    case SynapseType::ExcSlow: return "exc_slow";
    case SynapseType::InhFast: return "inh_fast";
    case SynapseType::InhSlow: return "inh_slow";
    }
    return "?";
}

const char* population_name(Population pop) {
    switch (pop) {
    case Population::InputExpansion: return "input_expansion";
    case Population::Excitatory: return "excitatory";
    case Population::Inhibitory: return "inhibitory";
    }
    return "?";
}

namespace {

// Draws `count` presynaptic sources for one neuron, uniformly with
// replacement from [lo, hi) minus `exclude`. In hardware-fidelity mode a
// draw that would push the neuron's distinct-source set past the cap is
// redirected to an already-subscribed source in range.
void draw_afferents(std::mt19937_64& rng, uint32_t lo, uint32_t hi, int count,
                    uint32_t post, SynapseType type, int64_t exclude,
                    const TopologyConfig& cfg, std::set<uint32_t>& distinct,
                    std::map<std::pair<uint32_t, SynapseType>, int>& bundle) {
    std::uniform_int_distribution<uint32_t> pick(lo, hi - 1);
    const bool capped = cfg.mode == TopologyMode::HardwareFidelity;
    for (int i = 0; i < count; ++i) {
        uint32_t pre;
        for (;;) {
            pre = pick(rng);
            if (static_cast<int64_t>(pre) == exclude)
                continue;
            if (capped && distinct.size() >= static_cast<size_t>(cfg.max_distinct_sources) &&
                !distinct.count(pre)) {
                // reuse: pick among already-subscribed sources inside [lo, hi)
                std::vector<uint32_t> in_range;
                for (uint32_t s : distinct)
                    if (s >= lo && s < hi && static_cast<int64_t>(s) != exclude)
                        in_range.push_back(s);
                if (in_range.empty())
                    throw Error(ErrorCode::Config,
                                "InfeasibleConstraint: distinct-source cap leaves no source for "
                                "neuron " + std::to_string(post));
                std::uniform_int_distribution<size_t> reuse(0, in_range.size() - 1);
                pre = in_range[reuse(rng)];
            }
            break;
        }
        distinct.insert(pre);
        bundle[{pre, type}]++;
    }
}

} // namespace

NetworkTopology build_topology(const TopologyConfig& cfg) {
    if (cfg.n_input <= 0 || cfg.n_exc <= 1 || cfg.n_inh <= 0)
        throw Error(ErrorCode::Config, "InvalidConfig: population sizes");
    if (cfg.input_syn_min < 1 || cfg.input_syn_max < cfg.input_syn_min)
        throw Error(ErrorCode::Config, "InvalidConfig: input synapse range");
    if (cfg.mode == TopologyMode::HardwareFidelity && cfg.max_distinct_sources < 3)
        throw Error(ErrorCode::Config,
                    "InfeasibleConstraint: cap below one source per afferent pathway");

    NetworkTopology topology;
    topology.cfg = cfg;

    std::mt19937_64 rng_taps(mix_seed(cfg.seed, 1));
    std::uniform_int_distribution<int> pick_line(0, cfg.n_input_lines - 1);
    std::uniform_int_distribution<int> pick_syn(cfg.input_syn_min, cfg.input_syn_max);
    topology.input_map.resize(cfg.n_input);
    for (auto& tap : topology.input_map) {
        tap.line = static_cast<uint32_t>(pick_line(rng_taps));
        tap.n_synapses = static_cast<uint16_t>(pick_syn(rng_taps));
    }

    const uint32_t e0 = topology.exc_begin();
    const uint32_t i0 = topology.inh_begin();

    std::mt19937_64 rng_edges(mix_seed(cfg.seed, 2));
    for (uint32_t post = e0; post < i0; ++post) {
        std::set<uint32_t> distinct;
        std::map<std::pair<uint32_t, SynapseType>, int> bundle;
        draw_afferents(rng_edges, 0, e0, cfg.fanin_input_to_exc, post, SynapseType::ExcFast,
                       -1, cfg, distinct, bundle);
        draw_afferents(rng_edges, e0, i0, cfg.fanin_exc_to_exc, post, SynapseType::ExcFast,
                       post, cfg, distinct, bundle);  // no self-connections
        draw_afferents(rng_edges, i0, i0 + cfg.n_inh, cfg.fanin_inh_to_exc, post,
                       SynapseType::InhFast, -1, cfg, distinct, bundle);
        for (const auto& [key, mult] : bundle)
            topology.edges.push_back({key.first, post, key.second,
                                      static_cast<uint16_t>(mult)});
    }
    for (uint32_t post = i0; post < i0 + static_cast<uint32_t>(cfg.n_inh); ++post) {
        std::set<uint32_t> distinct;
        std::map<std::pair<uint32_t, SynapseType>, int> bundle;
        draw_afferents(rng_edges, e0, i0, cfg.fanin_exc_to_inh, post, SynapseType::ExcFast,
                       -1, cfg, distinct, bundle);
        for (const auto& [key, mult] : bundle)
            topology.edges.push_back({key.first, post, key.second,
                                      static_cast<uint16_t>(mult)});
    }

    validate_topology(topology);
    return topology;
}

void validate_topology(const NetworkTopology& topology) {
    const auto& cfg = topology.cfg;
    if (topology.input_map.size() != static_cast<size_t>(cfg.n_input))
        throw Error(ErrorCode::Data, "input map size mismatch");
    for (const auto& tap : topology.input_map) {
        if (tap.line >= static_cast<uint32_t>(cfg.n_input_lines))
            throw Error(ErrorCode::Data, "input tap references unknown line");
        if (tap.n_synapses < cfg.input_syn_min || tap.n_synapses > cfg.input_syn_max)
            throw Error(ErrorCode::Data, "input tap synapse count out of range");
    }

    const int n = topology.n_neurons();
    // in-degree per (post, pre population), multiplicity counted
    std::vector<std::array<int, 3>> fanin(n, {0, 0, 0});
    std::vector<std::unordered_set<uint32_t>> distinct(n);
    for (const auto& edge : topology.edges) {
        if (edge.pre >= static_cast<uint32_t>(n) || edge.post >= static_cast<uint32_t>(n))
            throw Error(ErrorCode::Data, "edge references unknown neuron");
        if (edge.multiplicity < 1)
            throw Error(ErrorCode::Data, "edge with zero multiplicity");
        Population pre_pop = topology.population_of(edge.pre);
        Population post_pop = topology.population_of(edge.post);
        if (post_pop == Population::InputExpansion)
            throw Error(ErrorCode::Data, "input-expansion neuron with network afferent");
        if (post_pop == Population::Inhibitory && pre_pop != Population::Excitatory)
            throw Error(ErrorCode::Data, "inhibitory neuron with non-excitatory afferent");
        if (edge.pre == edge.post)
            throw Error(ErrorCode::Data, "self-connection");
        fanin[edge.post][static_cast<int>(pre_pop)] += edge.multiplicity;
        distinct[edge.post].insert(edge.pre);
    }
    for (uint32_t id = topology.exc_begin(); id < topology.inh_begin(); ++id) {
        if (fanin[id][0] != cfg.fanin_input_to_exc ||
            fanin[id][1] != cfg.fanin_exc_to_exc ||
            fanin[id][2] != cfg.fanin_inh_to_exc)
            throw Error(ErrorCode::Data,
                        "excitatory neuron " + std::to_string(id) + " fan-in mismatch");
    }
    for (uint32_t id = topology.inh_begin(); id < static_cast<uint32_t>(n); ++id) {
        if (fanin[id][1] != cfg.fanin_exc_to_inh)
            throw Error(ErrorCode::Data,
                        "inhibitory neuron " + std::to_string(id) + " fan-in mismatch");
    }
    if (cfg.mode == TopologyMode::HardwareFidelity) {
        for (int id = 0; id < n; ++id)
            if (distinct[id].size() > static_cast<size_t>(cfg.max_distinct_sources))
                throw Error(ErrorCode::Data, "distinct-source cap exceeded");
    }
}

ConnectivityReport connectivity_report(const NetworkTopology& topology) {
    const auto& cfg = topology.cfg;
    ConnectivityReport report;
    std::vector<std::unordered_set<uint32_t>> distinct(topology.n_neurons());
    double in_exc = 0, exc_exc = 0, exc_inh = 0, inh_exc = 0;
    for (const auto& edge : topology.edges) {
        Population pre_pop = topology.population_of(edge.pre);
        Population post_pop = topology.population_of(edge.post);
        distinct[edge.post].insert(edge.pre);
        double m = edge.multiplicity;
        if (post_pop == Population::Excitatory) {
            if (pre_pop == Population::InputExpansion)
                in_exc += m;
            else if (pre_pop == Population::Excitatory)
                exc_exc += m;
            else
                inh_exc += m;
        } else if (post_pop == Population::Inhibitory && pre_pop == Population::Excitatory) {
            exc_inh += m;
        }
    }
    auto stats = [](double total, int n_post, int n_pre) {
        PathwayStats s;
        s.mean_in_degree = n_post > 0 ? total / n_post : 0.0;
        s.density = n_pre > 0 ? s.mean_in_degree / n_pre : 0.0;
        return s;
    };
    report.input_to_exc = stats(in_exc, cfg.n_exc, cfg.n_input);
    report.exc_to_exc = stats(exc_exc, cfg.n_exc, cfg.n_exc);
    report.inh_to_exc = stats(inh_exc, cfg.n_exc, cfg.n_inh);
    report.exc_to_inh = stats(exc_inh, cfg.n_inh, cfg.n_exc);
    size_t max_distinct = 0;
    for (int id = 0; id < topology.n_neurons(); ++id)
        max_distinct = std::max(max_distinct, distinct[id].size());
    // input taps are one subscription each
    for ([[maybe_unused]] const auto& tap : topology.input_map)
        max_distinct = std::max<size_t>(max_distinct, 1);
    report.max_distinct_sources = static_cast<int>(max_distinct);
    return report;
}

std::string connectivity_report_text(const ConnectivityReport& report) {
    char buf[512];
    std::string out = "pathway            mean fan-in   density\n";
    auto row = [&](const char* name, const PathwayStats& s) {
        std::snprintf(buf, sizeof(buf), "%-18s %9.2f   %6.2f %%\n", name, s.mean_in_degree,
                      s.density * 100.0);
        out += buf;
    };
    row("input -> exc", report.input_to_exc);
    row("exc -> exc", report.exc_to_exc);
    row("exc -> inh", report.exc_to_inh);
    row("inh -> exc", report.inh_to_exc);
    std::snprintf(buf, sizeof(buf), "max distinct presynaptic sources: %d\n",
                  report.max_distinct_sources);
    out += buf;
    return out;
}

std::string topology_to_json(const NetworkTopology& topology) {
    json j;
    j["version"] = 1;
    j["config"] = {
        {"n_input_lines", topology.cfg.n_input_lines},
        {"n_input", topology.cfg.n_input},
        {"n_exc", topology.cfg.n_exc},
        {"n_inh", topology.cfg.n_inh},
        {"fanin_input_to_exc", topology.cfg.fanin_input_to_exc},
        {"fanin_exc_to_exc", topology.cfg.fanin_exc_to_exc},
        {"fanin_inh_to_exc", topology.cfg.fanin_inh_to_exc},
        {"fanin_exc_to_inh", topology.cfg.fanin_exc_to_inh},
        {"input_syn_min", topology.cfg.input_syn_min},
        {"input_syn_max", topology.cfg.input_syn_max},
        {"max_distinct_sources", topology.cfg.max_distinct_sources},
        {"mode", topology.cfg.mode == TopologyMode::Free ? "free" : "hardware_fidelity"},
        {"seed", topology.cfg.seed},
    };
    json taps = json::array();
    for (const auto& tap : topology.input_map)
        taps.push_back({tap.line, tap.n_synapses});
    j["input_map"] = std::move(taps);
    json edges = json::array();
    for (const auto& edge : topology.edges)
        edges.push_back({edge.pre, edge.post, static_cast<int>(edge.type), edge.multiplicity});
    j["edges"] = std::move(edges);
    return j.dump();
}

NetworkTopology topology_from_json(const std::string& text) {
    json j = json::parse(text);
    if (j.value("version", 0) != 1)
        throw Error(ErrorCode::Format, "unknown topology file version");
    NetworkTopology topology;
    const auto& c = j.at("config");
    topology.cfg.n_input_lines = c.at("n_input_lines");
    topology.cfg.n_input = c.at("n_input");
    topology.cfg.n_exc = c.at("n_exc");
    topology.cfg.n_inh = c.at("n_inh");
    topology.cfg.fanin_input_to_exc = c.at("fanin_input_to_exc");
    topology.cfg.fanin_exc_to_exc = c.at("fanin_exc_to_exc");
    topology.cfg.fanin_inh_to_exc = c.at("fanin_inh_to_exc");
    topology.cfg.fanin_exc_to_inh = c.at("fanin_exc_to_inh");
    topology.cfg.input_syn_min = c.at("input_syn_min");
    topology.cfg.input_syn_max = c.at("input_syn_max");
    topology.cfg.max_distinct_sources = c.at("max_distinct_sources");
    topology.cfg.mode = c.at("mode") == "free" ? TopologyMode::Free
                                               : TopologyMode::HardwareFidelity;
    topology.cfg.seed = c.at("seed");
    for (const auto& tap : j.at("input_map"))
        topology.input_map.push_back(
            {tap.at(0).get<uint32_t>(), tap.at(1).get<uint16_t>()});
    for (const auto& edge : j.at("edges"))
        topology.edges.push_back({edge.at(0).get<uint32_t>(), edge.at(1).get<uint32_t>(),
                                  static_cast<SynapseType>(edge.at(2).get<int>()),
                                  edge.at(3).get<uint16_t>()});
    validate_topology(topology);
    return topology;
}

} // namespace ecgres
