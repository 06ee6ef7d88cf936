#include "ecgres/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <json.hpp>

#include "ecgres/errors.hpp"
#include "ecgres/util.hpp"

using nlohmann::json;

namespace ecgres {

NeuronParamArrays inject_mismatch(const PopulationParamSet& base,
                                  const NetworkTopology& topology, double cv,
                                  uint64_t seed) {
    if (cv < 0.0 || cv >= 1.0)
        throw Error(ErrorCode::Config, "InvalidConfig: mismatch cv outside [0, 1)");
    const size_t n = static_cast<size_t>(topology.n_neurons());
    NeuronParamArrays out;
    out.tau_mem_s.resize(n);
    out.v_thresh.resize(n);
    out.v_reset.resize(n);
    out.refractory_s.resize(n);
    for (auto& v : out.tau_syn_s)
        v.resize(n);

    // log-normal with unit median: exp(sigma * z), CV = sqrt(exp(sigma^2) - 1)
    const double sigma = std::sqrt(std::log1p(cv * cv));
    std::mt19937_64 rng(mix_seed(seed, 0xa11));
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto draw = [&]() { return cv == 0.0 ? 1.0 : std::exp(sigma * gauss(rng)); };

    for (size_t i = 0; i < n; ++i) {
        const NeuronParams& p = base.of(topology.population_of(static_cast<uint32_t>(i)));
        out.tau_mem_s[i] = p.tau_mem_s * draw();
        for (int t = 0; t < 4; ++t)
            out.tau_syn_s[t][i] = p.tau_syn_s[t] * draw();
        out.v_thresh[i] = p.v_thresh * draw();
        out.v_reset[i] = p.v_reset * draw();
        out.refractory_s[i] = p.refractory_s * draw();
        if (out.tau_mem_s[i] <= 0 || out.v_thresh[i] <= out.v_reset[i])
            throw Error(ErrorCode::Config, "InvalidConfig: degenerate neuron parameters");
    }
    return out;
}

std::string weights_to_json(const WeightTable& table) {
    json j;
    j["version"] = 1;
    for (int p = 0; p < 3; ++p) {
        json row;
        for (int t = 0; t < 4; ++t)
            row[synapse_type_name(static_cast<SynapseType>(t))] = table.w[p][t];
        j["weights"][population_name(static_cast<Population>(p))] = row;
    }
    return j.dump(2);
}

WeightTable weights_from_json(const std::string& text) {
    json j = json::parse(text);
    WeightTable table;
    for (int p = 0; p < 3; ++p)
        for (int t = 0; t < 4; ++t)
            table.w[p][t] = j.at("weights")
                                .at(population_name(static_cast<Population>(p)))
                                .at(synapse_type_name(static_cast<SynapseType>(t)));
    return table;
}

namespace {

bool is_inhibitory_type(SynapseType type) {
    return type == SynapseType::InhFast || type == SynapseType::InhSlow;
}

void check_weight_signs(const WeightTable& table) {
    for (int p = 0; p < 3; ++p)
        for (int t = 0; t < 4; ++t) {
            double w = table.w[p][t];
            bool inh = is_inhibitory_type(static_cast<SynapseType>(t));
            if (inh && w > 0.0)
                throw Error(ErrorCode::Config, "InvalidConfig: positive inhibitory weight");
            if (!inh && w < 0.0)
                throw Error(ErrorCode::Config, "InvalidConfig: negative excitatory weight");
        }
}

struct Target {
    uint32_t post;
    uint32_t type;
    double add;
};

// compressed adjacency keyed by source (input line or neuron)
struct Fanout {
    std::vector<uint32_t> offset;
    std::vector<Target> targets;
};

Fanout build_fanout(size_t n_sources, std::vector<std::pair<uint32_t, Target>>&& raw) {
    std::stable_sort(raw.begin(), raw.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    Fanout fan;
    fan.offset.assign(n_sources + 1, 0);
    for (const auto& [src, tgt] : raw)
        fan.offset[src + 1]++;
    for (size_t i = 1; i < fan.offset.size(); ++i)
        fan.offset[i] += fan.offset[i - 1];
    fan.targets.reserve(raw.size());
    for (auto& [src, tgt] : raw)
        fan.targets.push_back(tgt);
    return fan;
}

} // namespace

void simulate_stream(const NetworkTopology& topology, const NeuronParamArrays& params,
                     const WeightTable& weights, const EventTrain& input,
                     double duration_s, const SimConfig& cfg, const SpikeSink& sink,
                     VoltageProbe* probe) {
    const size_t n = static_cast<size_t>(topology.n_neurons());
    if (params.size() != n)
        throw Error(ErrorCode::Config, "InvalidConfig: parameter arrays do not match topology");
    if (!(cfg.dt_s > 0.0))
        throw Error(ErrorCode::Config, "InvalidConfig: dt must be positive");
    check_weight_signs(weights);
    double min_tau = params.tau_mem_s.empty() ? 1.0 : params.tau_mem_s[0];
    for (double t : params.tau_mem_s)
        min_tau = std::min(min_tau, t);
    for (const auto& taus : params.tau_syn_s)
        for (double t : taus)
            min_tau = std::min(min_tau, t);
    if (cfg.dt_s > min_tau / 10.0)
        throw Error(ErrorCode::Config, "InvalidConfig: dt exceeds min(tau)/10");

    const double dt = cfg.dt_s;

    // per-neuron step constants
    std::vector<double> decay_mem(n), gain_mem(n), vth(n), vres(n);
    std::array<std::vector<double>, 4> decay_syn;
    for (auto& d : decay_syn)
        d.resize(n);
    std::vector<int64_t> refr_steps(n);
    for (size_t i = 0; i < n; ++i) {
        decay_mem[i] = std::exp(-dt / params.tau_mem_s[i]);
        gain_mem[i] = 1.0 - decay_mem[i];
        for (int t = 0; t < 4; ++t)
            decay_syn[t][i] = std::exp(-dt / params.tau_syn_s[t][i]);
        vth[i] = params.v_thresh[i];
        vres[i] = params.v_reset[i];
        refr_steps[i] = static_cast<int64_t>(std::ceil(params.refractory_s[i] / dt));
    }

    // adjacency
    std::vector<std::pair<uint32_t, Target>> raw_line;
    const double w_tap = weights.at(Population::InputExpansion, SynapseType::ExcFast);
    for (uint32_t i = 0; i < topology.input_map.size(); ++i) {
        const auto& tap = topology.input_map[i];
        raw_line.push_back({tap.line,
                            {i, static_cast<uint32_t>(SynapseType::ExcFast),
                             w_tap * tap.n_synapses}});
    }
    Fanout line_fan = build_fanout(static_cast<size_t>(topology.cfg.n_input_lines),
                                   std::move(raw_line));

    std::vector<std::pair<uint32_t, Target>> raw_spike;
    for (const auto& edge : topology.edges) {
        double w = weights.at(topology.population_of(edge.post), edge.type) *
                   edge.multiplicity;
        raw_spike.push_back({edge.pre,
                             {edge.post, static_cast<uint32_t>(edge.type), w}});
    }
    Fanout spike_fan = build_fanout(n, std::move(raw_spike));

    // state
    std::vector<double> v(n, 0.0);
    std::array<std::vector<double>, 4> isyn;
    for (auto& a : isyn)
        a.assign(n, 0.0);
    std::vector<int64_t> refr_until(n, -1);
    std::vector<uint32_t> pending, firing;

    // runaway detection: spike counts per rolling one-second window
    std::vector<uint32_t> window_count(n, 0);
    int64_t window_index = 0;
    const int64_t steps_per_second = static_cast<int64_t>(std::llround(1.0 / dt));

    if (probe) {
        probe->times_s.clear();
        probe->traces.assign(probe->neurons.size(), {});
    }

    const int64_t n_steps = static_cast<int64_t>(std::ceil(duration_s / dt));
    size_t next_event = 0;
    const auto& events = input.events;

    for (int64_t step = 0; step < n_steps; ++step) {
        const double t1 = static_cast<double>(step + 1) * dt;

        for (int t = 0; t < 4; ++t) {
            double* cur = isyn[t].data();
            const double* dec = decay_syn[t].data();
            for (size_t i = 0; i < n; ++i)
                cur[i] *= dec[i];
        }

        // spikes from the previous step
        for (uint32_t pre : pending) {
            for (uint32_t e = spike_fan.offset[pre]; e < spike_fan.offset[pre + 1]; ++e) {
                const Target& tgt = spike_fan.targets[e];
                isyn[tgt.type][tgt.post] += tgt.add;
            }
        }
        pending.clear();

        // encoder events stamped within this step
        while (next_event < events.size() && events[next_event].time_s <= t1) {
            uint32_t line = events[next_event].source;
            if (line < line_fan.offset.size() - 1) {
                for (uint32_t e = line_fan.offset[line]; e < line_fan.offset[line + 1]; ++e) {
                    const Target& tgt = line_fan.targets[e];
                    isyn[tgt.type][tgt.post] += tgt.add;
                }
            }
            ++next_event;
        }

        const double* i0 = isyn[0].data();
        const double* i1 = isyn[1].data();
        const double* i2 = isyn[2].data();
        const double* i3 = isyn[3].data();
        for (size_t i = 0; i < n; ++i) {
            if (static_cast<int64_t>(step) < refr_until[i])
                continue;
            double vi = v[i] * decay_mem[i] + gain_mem[i] * (i0[i] + i1[i] + i2[i] + i3[i]);
            if (cfg.enable_spiking && vi >= vth[i]) {
                v[i] = vres[i];
                refr_until[i] = step + 1 + refr_steps[i];
                firing.push_back(static_cast<uint32_t>(i));
            } else {
                v[i] = vi;
            }
        }

        for (uint32_t neuron : firing) {
            sink(t1, neuron);
            if (++window_count[neuron] > cfg.max_rate_hz)
                throw Error(ErrorCode::Numeric,
                            "UnstableConfig: neuron " + std::to_string(neuron) +
                                " exceeded " + std::to_string(cfg.max_rate_hz) +
                                " Hz within one second");
            pending.push_back(neuron);
        }
        firing.clear();

        if ((step + 1) % steps_per_second == 0) {
            std::fill(window_count.begin(), window_count.end(), 0);
            ++window_index;
        }

        if (probe) {
            probe->times_s.push_back(t1);
            for (size_t p = 0; p < probe->neurons.size(); ++p)
                probe->traces[p].push_back(v[probe->neurons[p]]);
        }
    }
}

SpikeRecord simulate(const NetworkTopology& topology, const NeuronParamArrays& params,
                     const WeightTable& weights, const EventTrain& input,
                     const SimConfig& cfg, VoltageProbe* probe) {
    SpikeRecord record;
    record.duration_s = input.duration_s;
    simulate_stream(topology, params, weights, input, input.duration_s, cfg,
                    [&](double t, uint32_t neuron) {
                        record.spikes.push_back({t, neuron});
                    },
                    probe);
    return record;
}

RateSeries rate_report(const SpikeRecord& record, const NetworkTopology& topology,
                       double window_s) {
    if (!(window_s > 0.0))
        throw Error(ErrorCode::Config, "InvalidConfig: window must be positive");
    RateSeries series;
    series.window_s = window_s;
    size_t n_windows = static_cast<size_t>(std::ceil(record.duration_s / window_s));
    if (record.duration_s <= 0.0)
        n_windows = 0;
    series.window_start_s.resize(n_windows);
    series.rate_hz.assign(n_windows, {0.0, 0.0, 0.0});
    for (size_t w = 0; w < n_windows; ++w)
        series.window_start_s[w] = static_cast<double>(w) * window_s;
    const double pop_size[3] = {static_cast<double>(topology.cfg.n_input),
                                static_cast<double>(topology.cfg.n_exc),
                                static_cast<double>(topology.cfg.n_inh)};
    for (const auto& spike : record.spikes) {
        size_t w = static_cast<size_t>(spike.time_s / window_s);
        if (w >= n_windows)
            w = n_windows - 1;
        series.rate_hz[w][static_cast<int>(topology.population_of(spike.neuron))] += 1.0;
    }
    for (auto& row : series.rate_hz)
        for (int p = 0; p < 3; ++p)
            row[p] /= window_s * pop_size[p];
    return series;
}

namespace {

struct TuneProbe {
    double stim_rate_hz = 0.0;  // mean excitatory rate during stimulation
    bool decayed = false;
};

TuneProbe probe_weights(const NetworkTopology& topology, const NeuronParamArrays& params,
                        const WeightTable& table, const EventTrain& sample,
                        const SimConfig& sim_cfg, const TuneConfig& tune_cfg) {
    EventTrain padded = sample;
    padded.duration_s = sample.duration_s + tune_cfg.silence_s;
    SimConfig cfg = sim_cfg;
    cfg.max_rate_hz = 1e9;  // probes may legitimately run hot

    const double stim_end = sample.duration_s;
    const double tail_begin = stim_end + tune_cfg.decay_check_at_s;
    const double tail_end = tail_begin + tune_cfg.decay_window_s;
    uint64_t stim_spikes = 0, tail_spikes = 0;
    const uint32_t e0 = topology.exc_begin(), i0 = topology.inh_begin();
    simulate_stream(topology, params, table, padded, padded.duration_s, cfg,
                    [&](double t, uint32_t neuron) {
                        if (neuron < e0 || neuron >= i0)
                            return;
                        if (t <= stim_end)
                            ++stim_spikes;
                        else if (t >= tail_begin && t < tail_end)
                            ++tail_spikes;
                    });
    TuneProbe result;
    result.stim_rate_hz =
        static_cast<double>(stim_spikes) / stim_end / topology.cfg.n_exc;
    double tail_rate = static_cast<double>(tail_spikes) / tune_cfg.decay_window_s /
                       topology.cfg.n_exc;
    result.decayed = tail_rate < tune_cfg.decay_max_hz;
    return result;
}

WeightTable scale_weights(const WeightTable& base, double exc_scale, double inh_scale) {
    WeightTable out = base;
    for (int p = 0; p < 3; ++p)
        for (int t = 0; t < 4; ++t)
            out.w[p][t] *= is_inhibitory_type(static_cast<SynapseType>(t)) ? inh_scale
                                                                           : exc_scale;
    return out;
}

} // namespace

WeightTable tune_weights(const NetworkTopology& topology, const NeuronParamArrays& params,
                         const WeightTable& base, const EventTrain& sample,
                         const SimConfig& sim_cfg, const TuneConfig& tune_cfg) {
    if (sample.duration_s < 10.0)
        throw Error(ErrorCode::Config, "InvalidConfig: tuning sample shorter than 10 s");

    auto probe = [&](double se, double si) {
        return probe_weights(topology, params, scale_weights(base, se, si), sample,
                             sim_cfg, tune_cfg);
    };

    int evals = 0;
    auto budget = [&]() {
        if (++evals > tune_cfg.max_weight_steps)
            throw Error(ErrorCode::Numeric,
                        "TuningFailed: no stable weight scaling within budget");
    };

    double se = 1.0, si = 1.0;
    budget();
    TuneProbe first = probe(se, si);
    if (first.stim_rate_hz >= tune_cfg.rate_lo_hz &&
        first.stim_rate_hz <= tune_cfg.rate_hi_hz && first.decayed)
        return base;  // fixed point

    for (int round = 0; round < 6; ++round) {
        // geometric search for an excitatory scale inside the rate band
        double lo = 0.0, hi = 0.0;  // bracket: rate(lo) < band_lo, rate(hi) > band_hi
        double rate = round == 0 ? first.stim_rate_hz : -1.0;
        if (rate < 0.0) {
            budget();
            rate = probe(se, si).stim_rate_hz;
        }
        bool in_band = false;
        if (rate < tune_cfg.rate_lo_hz) {
            lo = se;
            while (true) {
                se *= 2.0;
                budget();
                rate = probe(se, si).stim_rate_hz;
                if (rate > tune_cfg.rate_hi_hz) {
                    hi = se;
                    break;
                }
                if (rate >= tune_cfg.rate_lo_hz) {
                    in_band = true;
                    break;
                }
                lo = se;
            }
        } else if (rate > tune_cfg.rate_hi_hz) {
            hi = se;
            while (true) {
                se *= 0.5;
                budget();
                rate = probe(se, si).stim_rate_hz;
                if (rate < tune_cfg.rate_lo_hz) {
                    lo = se;
                    break;
                }
                if (rate <= tune_cfg.rate_hi_hz) {
                    in_band = true;
                    break;
                }
                hi = se;
            }
        } else {
            in_band = true;
        }
        while (!in_band) {
            se = std::sqrt(lo * hi);
            budget();
            rate = probe(se, si).stim_rate_hz;
            if (rate < tune_cfg.rate_lo_hz)
                lo = se;
            else if (rate > tune_cfg.rate_hi_hz)
                hi = se;
            else
                in_band = true;
        }

        budget();
        TuneProbe final_probe = probe(se, si);
        if (final_probe.stim_rate_hz >= tune_cfg.rate_lo_hz &&
            final_probe.stim_rate_hz <= tune_cfg.rate_hi_hz && final_probe.decayed)
            return scale_weights(base, se, si);

        // rich enough but not dying out: strengthen inhibition and retry
        si *= 2.0;
    }
    throw Error(ErrorCode::Numeric, "TuningFailed: criteria not met after inhibition sweep");
}

} // namespace ecgres
