#pragma once

#include <string>
#include <vector>

#include "ecgres/config.hpp"

namespace ecgres {

// File-driven experiment pipeline. Stages exchange artifacts only through
// the output directory; a manifest records every consumed and produced
// file's content hash, so completed stages are skipped and corrupted
// upstream artifacts are refused.
class Pipeline {
public:
    explicit Pipeline(ExperimentConfig cfg);

    // The nine manifest stages, in execution order.
    static const std::vector<std::string>& stage_names();

    // Runs one stage. Also accepts "synth" (generate synthetic records into
    // records_dir), "report" (presentation outputs, no manifest entry) and
    // "all". Returns false when the stage was already up to date.
    bool run_stage(const std::string& name);
    void run_all();

    const ExperimentConfig& config() const { return cfg_; }
    std::string out_path(const std::string& rel) const;

private:
    struct StageIO {
        // inputs as (path, producing stage or "" for external files)
        std::vector<std::pair<std::string, std::string>> inputs;
        std::vector<std::string> outputs;
    };

    StageIO stage_io(const std::string& name) const;
    std::vector<std::string> used_records() const;

    void stage_ingest();
    void stage_dataset();
    void stage_encode();
    void stage_build();
    void stage_tune();
    void stage_simulate();
    void stage_train();
    void stage_calibrate();
    void stage_evaluate();
    void stage_report();

    ExperimentConfig cfg_;
};

} // namespace ecgres
