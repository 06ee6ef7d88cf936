#include "ecgres/config.hpp"

#include <set>

#include <json.hpp>

#include "ecgres/errors.hpp"
#include "ecgres/util.hpp"

using nlohmann::json;

namespace ecgres {

namespace {

[[noreturn]] void bad(const std::string& what) {
    throw Error(ErrorCode::Config, "config: " + what);
}

void check_keys(const json& j, const std::string& where,
                const std::set<std::string>& allowed) {
    if (!j.is_object())
        bad(where + " must be an object");
    for (const auto& [key, value] : j.items())
        if (!allowed.count(key))
            bad("unknown key '" + key + "' in " + where);
}

template <typename T>
void get_to(const json& j, const char* key, T& out) {
    if (j.contains(key))
        j.at(key).get_to(out);
}

template <size_t N>
void get_array(const json& j, const char* key, const std::string& where,
               std::array<int, N>& out) {
    if (!j.contains(key))
        return;
    const auto& a = j.at(key);
    if (!a.is_array() || a.size() != N)
        bad(where + "." + key + " must be an array of " + std::to_string(N));
    for (size_t i = 0; i < N; ++i)
        out[i] = a.at(i).get<int>();
}

NeuronParams neuron_params_from_json(const json& j, const std::string& where) {
    check_keys(j, where, {"tau_mem_s", "tau_syn_s", "v_thresh", "v_reset", "refractory_s"});
    NeuronParams p;
    get_to(j, "tau_mem_s", p.tau_mem_s);
    if (j.contains("tau_syn_s")) {
        const auto& a = j.at("tau_syn_s");
        if (!a.is_array() || a.size() != 4)
            bad(where + ".tau_syn_s must have 4 entries");
        for (int i = 0; i < 4; ++i)
            p.tau_syn_s[i] = a.at(i).get<double>();
    }
    get_to(j, "v_thresh", p.v_thresh);
    get_to(j, "v_reset", p.v_reset);
    get_to(j, "refractory_s", p.refractory_s);
    return p;
}

json neuron_params_to_json(const NeuronParams& p) {
    return json{{"tau_mem_s", p.tau_mem_s},
                {"tau_syn_s", p.tau_syn_s},
                {"v_thresh", p.v_thresh},
                {"v_reset", p.v_reset},
                {"refractory_s", p.refractory_s}};
}

WeightTable weights_from_config_json(const json& j, WeightTable table) {
    for (int p = 0; p < 3; ++p) {
        const char* pop = population_name(static_cast<Population>(p));
        if (!j.contains(pop))
            continue;
        check_keys(j.at(pop), std::string("weights.") + pop,
                   {"exc_fast", "exc_slow", "inh_fast", "inh_slow"});
        for (int t = 0; t < 4; ++t) {
            const char* ty = synapse_type_name(static_cast<SynapseType>(t));
            if (j.at(pop).contains(ty))
                table.w[p][t] = j.at(pop).at(ty).get<double>();
        }
    }
    return table;
}

json weights_to_config_json(const WeightTable& table) {
    json j;
    for (int p = 0; p < 3; ++p) {
        json row;
        for (int t = 0; t < 4; ++t)
            row[synapse_type_name(static_cast<SynapseType>(t))] = table.w[p][t];
        j[population_name(static_cast<Population>(p))] = row;
    }
    return j;
}

} // namespace

WeightTable default_base_weights() {
    WeightTable table;
    table.at(Population::InputExpansion, SynapseType::ExcFast) = 0.02;
    table.at(Population::Excitatory, SynapseType::ExcFast) = 0.010;
    table.at(Population::Excitatory, SynapseType::InhFast) = -0.020;
    table.at(Population::Inhibitory, SynapseType::ExcFast) = 0.010;
    return table;
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        bad(std::string("not valid JSON: ") + e.what());
    }
    check_keys(j, "config",
               {"records_dir", "out_dir", "split", "dataset", "encoder", "topology",
                "mismatch", "simulator", "neuron_params", "weights", "tune", "readout",
                "synth"});

    ExperimentConfig cfg;
    cfg.base_weights = default_base_weights();
    get_to(j, "records_dir", cfg.records_dir);
    get_to(j, "out_dir", cfg.out_dir);

    if (j.contains("split")) {
        const auto& s = j.at("split");
        check_keys(s, "split",
                   {"seed", "train_frac", "val_frac", "train_records", "val_records",
                    "test_records"});
        get_to(s, "seed", cfg.split.seed);
        get_to(s, "train_frac", cfg.split.train_frac);
        get_to(s, "val_frac", cfg.split.val_frac);
        get_to(s, "train_records", cfg.split.train_records);
        get_to(s, "val_records", cfg.split.val_records);
        get_to(s, "test_records", cfg.split.test_records);
    }
    if (j.contains("dataset")) {
        const auto& d = j.at("dataset");
        check_keys(d, "dataset",
                   {"train_beats", "train_seed", "val_seed", "test_seed",
                    "val_segments_per_class", "test_segments_per_class"});
        get_to(d, "train_beats", cfg.dataset.train_beats);
        get_to(d, "train_seed", cfg.dataset.train_seed);
        get_to(d, "val_seed", cfg.dataset.val_seed);
        get_to(d, "test_seed", cfg.dataset.test_seed);
        get_array(d, "val_segments_per_class", "dataset", cfg.dataset.val_segments);
        get_array(d, "test_segments_per_class", "dataset", cfg.dataset.test_segments);
    }
    if (j.contains("encoder")) {
        const auto& e = j.at("encoder");
        check_keys(e, "encoder",
                   {"target_rate_per_channel", "refractory_s", "calibrate_tol",
                    "calibrate_seconds"});
        get_to(e, "target_rate_per_channel", cfg.encoder.target_rate_per_channel);
        get_to(e, "refractory_s", cfg.encoder.refractory_s);
        get_to(e, "calibrate_tol", cfg.encoder.calibrate_tol);
        get_to(e, "calibrate_seconds", cfg.encoder.calibrate_seconds);
    }
    if (j.contains("topology")) {
        const auto& t = j.at("topology");
        check_keys(t, "topology",
                   {"seed", "mode", "n_input", "n_exc", "n_inh", "fanin_input_to_exc",
                    "fanin_exc_to_exc", "fanin_inh_to_exc", "fanin_exc_to_inh",
                    "input_syn_min", "input_syn_max", "max_distinct_sources"});
        get_to(t, "seed", cfg.topology.seed);
        if (t.contains("mode")) {
            std::string mode = t.at("mode");
            if (mode == "free")
                cfg.topology.mode = TopologyMode::Free;
            else if (mode == "hardware_fidelity")
                cfg.topology.mode = TopologyMode::HardwareFidelity;
            else
                bad("topology.mode must be 'free' or 'hardware_fidelity'");
        }
        get_to(t, "n_input", cfg.topology.n_input);
        get_to(t, "n_exc", cfg.topology.n_exc);
        get_to(t, "n_inh", cfg.topology.n_inh);
        get_to(t, "fanin_input_to_exc", cfg.topology.fanin_input_to_exc);
        get_to(t, "fanin_exc_to_exc", cfg.topology.fanin_exc_to_exc);
        get_to(t, "fanin_inh_to_exc", cfg.topology.fanin_inh_to_exc);
        get_to(t, "fanin_exc_to_inh", cfg.topology.fanin_exc_to_inh);
        get_to(t, "input_syn_min", cfg.topology.input_syn_min);
        get_to(t, "input_syn_max", cfg.topology.input_syn_max);
        get_to(t, "max_distinct_sources", cfg.topology.max_distinct_sources);
    }
    if (j.contains("mismatch")) {
        const auto& m = j.at("mismatch");
        check_keys(m, "mismatch", {"cv", "seed"});
        get_to(m, "cv", cfg.mismatch_cv);
        get_to(m, "seed", cfg.mismatch_seed);
    }
    if (j.contains("simulator")) {
        const auto& s = j.at("simulator");
        check_keys(s, "simulator", {"dt_s", "max_rate_hz"});
        get_to(s, "dt_s", cfg.sim.dt_s);
        get_to(s, "max_rate_hz", cfg.sim.max_rate_hz);
    }
    if (j.contains("neuron_params")) {
        const auto& p = j.at("neuron_params");
        check_keys(p, "neuron_params", {"input_expansion", "excitatory", "inhibitory"});
        if (p.contains("input_expansion"))
            cfg.neuron_params.input_expansion =
                neuron_params_from_json(p.at("input_expansion"), "neuron_params.input_expansion");
        if (p.contains("excitatory"))
            cfg.neuron_params.excitatory =
                neuron_params_from_json(p.at("excitatory"), "neuron_params.excitatory");
        if (p.contains("inhibitory"))
            cfg.neuron_params.inhibitory =
                neuron_params_from_json(p.at("inhibitory"), "neuron_params.inhibitory");
    }
    if (j.contains("weights"))
        cfg.base_weights = weights_from_config_json(j.at("weights"), cfg.base_weights);
    if (j.contains("tune")) {
        const auto& t = j.at("tune");
        check_keys(t, "tune",
                   {"rate_lo_hz", "rate_hi_hz", "silence_s", "decay_check_at_s",
                    "decay_window_s", "decay_max_hz", "max_weight_steps", "sample_seconds"});
        get_to(t, "rate_lo_hz", cfg.tune.search.rate_lo_hz);
        get_to(t, "rate_hi_hz", cfg.tune.search.rate_hi_hz);
        get_to(t, "silence_s", cfg.tune.search.silence_s);
        get_to(t, "decay_check_at_s", cfg.tune.search.decay_check_at_s);
        get_to(t, "decay_window_s", cfg.tune.search.decay_window_s);
        get_to(t, "decay_max_hz", cfg.tune.search.decay_max_hz);
        get_to(t, "max_weight_steps", cfg.tune.search.max_weight_steps);
        get_to(t, "sample_seconds", cfg.tune.sample_seconds);
    }
    if (j.contains("readout")) {
        const auto& r = j.at("readout");
        check_keys(r, "readout",
                   {"tau_out_s", "sample_period_s", "train_subsample", "ridge", "lambda_fp"});
        get_to(r, "tau_out_s", cfg.readout.tau_out_s);
        get_to(r, "sample_period_s", cfg.readout.sample_period_s);
        get_to(r, "train_subsample", cfg.readout.train_subsample);
        get_to(r, "ridge", cfg.readout.ridge);
        get_to(r, "lambda_fp", cfg.readout.lambda_fp);
    }
    if (j.contains("synth")) {
        const auto& s = j.at("synth");
        check_keys(s, "synth",
                   {"n_records", "seed", "runs_per_class", "run_min_beats", "run_max_beats",
                    "normal_run_min", "normal_run_max", "noise_mv"});
        get_to(s, "n_records", cfg.synth.n_records);
        get_to(s, "seed", cfg.synth.seed);
        get_to(s, "runs_per_class", cfg.synth.runs_per_class);
        get_to(s, "run_min_beats", cfg.synth.run_min_beats);
        get_to(s, "run_max_beats", cfg.synth.run_max_beats);
        get_to(s, "normal_run_min", cfg.synth.normal_run_min);
        get_to(s, "normal_run_max", cfg.synth.normal_run_max);
        get_to(s, "noise_mv", cfg.synth.noise_mv);
    }

    if (cfg.dataset.train_beats == 0)
        bad("dataset.train_beats must be positive");
    if (cfg.readout.train_subsample < 1)
        bad("readout.train_subsample must be >= 1");
    if (!(cfg.readout.sample_period_s > 0))
        bad("readout.sample_period_s must be positive");
    return cfg;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    return from_json_text(read_text_file(path));
}

std::string ExperimentConfig::to_json_text() const {
    json j;
    j["records_dir"] = records_dir;
    j["out_dir"] = out_dir;
    j["split"] = {{"seed", split.seed},
                  {"train_frac", split.train_frac},
                  {"val_frac", split.val_frac},
                  {"train_records", split.train_records},
                  {"val_records", split.val_records},
                  {"test_records", split.test_records}};
    j["dataset"] = {{"train_beats", dataset.train_beats},
                    {"train_seed", dataset.train_seed},
                    {"val_seed", dataset.val_seed},
                    {"test_seed", dataset.test_seed},
                    {"val_segments_per_class", dataset.val_segments},
                    {"test_segments_per_class", dataset.test_segments}};
    j["encoder"] = {{"target_rate_per_channel", encoder.target_rate_per_channel},
                    {"refractory_s", encoder.refractory_s},
                    {"calibrate_tol", encoder.calibrate_tol},
                    {"calibrate_seconds", encoder.calibrate_seconds}};
    j["topology"] = {{"seed", topology.seed},
                     {"mode", topology.mode == TopologyMode::Free ? "free"
                                                                  : "hardware_fidelity"},
                     {"n_input", topology.n_input},
                     {"n_exc", topology.n_exc},
                     {"n_inh", topology.n_inh},
                     {"fanin_input_to_exc", topology.fanin_input_to_exc},
                     {"fanin_exc_to_exc", topology.fanin_exc_to_exc},
                     {"fanin_inh_to_exc", topology.fanin_inh_to_exc},
                     {"fanin_exc_to_inh", topology.fanin_exc_to_inh},
                     {"input_syn_min", topology.input_syn_min},
                     {"input_syn_max", topology.input_syn_max},
                     {"max_distinct_sources", topology.max_distinct_sources}};
    j["mismatch"] = {{"cv", mismatch_cv}, {"seed", mismatch_seed}};
    j["simulator"] = {{"dt_s", sim.dt_s}, {"max_rate_hz", sim.max_rate_hz}};
    j["neuron_params"] = {{"input_expansion", neuron_params_to_json(neuron_params.input_expansion)},
                          {"excitatory", neuron_params_to_json(neuron_params.excitatory)},
                          {"inhibitory", neuron_params_to_json(neuron_params.inhibitory)}};
    j["weights"] = weights_to_config_json(base_weights);
    j["tune"] = {{"rate_lo_hz", tune.search.rate_lo_hz},
                 {"rate_hi_hz", tune.search.rate_hi_hz},
                 {"silence_s", tune.search.silence_s},
                 {"decay_check_at_s", tune.search.decay_check_at_s},
                 {"decay_window_s", tune.search.decay_window_s},
                 {"decay_max_hz", tune.search.decay_max_hz},
                 {"max_weight_steps", tune.search.max_weight_steps},
                 {"sample_seconds", tune.sample_seconds}};
    j["readout"] = {{"tau_out_s", readout.tau_out_s},
                    {"sample_period_s", readout.sample_period_s},
                    {"train_subsample", readout.train_subsample},
                    {"ridge", readout.ridge},
                    {"lambda_fp", readout.lambda_fp}};
    j["synth"] = {{"n_records", synth.n_records},
                  {"seed", synth.seed},
                  {"runs_per_class", synth.runs_per_class},
                  {"run_min_beats", synth.run_min_beats},
                  {"run_max_beats", synth.run_max_beats},
                  {"normal_run_min", synth.normal_run_min},
                  {"normal_run_max", synth.normal_run_max},
                  {"noise_mv", synth.noise_mv}};
    return j.dump(2) + "\n";
}

std::string ExperimentConfig::config_hash() const {
    // out_dir is where results land, not what they are
    ExperimentConfig c = *this;
    c.out_dir = "";
    std::string text = c.to_json_text();
    return hash_hex(fnv1a64({reinterpret_cast<const uint8_t*>(text.data()), text.size()}));
}

void ExperimentConfig::set(const std::string& dotted_key, const std::string& value) {
    json j = json::parse(to_json_text());
    json* node = &j;
    size_t pos = 0;
    for (;;) {
        size_t dot = dotted_key.find('.', pos);
        std::string part = dotted_key.substr(pos, dot - pos);
        if (part.empty())
            bad("empty path component in '" + dotted_key + "'");
        if (dot == std::string::npos) {
            json parsed;
            try {
                parsed = json::parse(value);
            } catch (const json::exception&) {
                parsed = value;  // bare word: treat as string
            }
            (*node)[part] = parsed;
            break;
        }
        if (!node->contains(part))
            bad("unknown config section '" + part + "'");
        node = &(*node)[part];
        pos = dot + 1;
    }
    *this = from_json_text(j.dump());
}

void apply_mini_preset(ExperimentConfig& cfg) {
    cfg.synth.n_records = 3;
    cfg.dataset.train_beats = 2000;
    cfg.dataset.val_segments = {2, 2, 2, 2, 2};
    cfg.dataset.test_segments = {2, 2, 2, 2, 2};
    cfg.sim.dt_s = 5e-4;
    cfg.encoder.calibrate_seconds = 30.0;
    cfg.readout.train_subsample = 8;
}

} // namespace ecgres
