#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "ecgres/readout.hpp"
#include "ecgres/types.hpp"

namespace ecgres {

// Asymmetric counting: positives are whole anomalous segments (detected if
// any unit is above its threshold at any sample inside), negatives are
// individual normal beats (a false positive is charged at most once per
// beat, however many samples or units fire in it).
struct ConfusionRow {
    int tp = 0;
    int fn = 0;
    int fp = 0;
    int tn = 0;
};

struct ConfusionCounts {
    std::array<ConfusionRow, kNumAnomalies> per_class;
    ConfusionRow overall;
    double normal_duration_s = 0.0;
};

// A detection by any unit counts for a segment of any label; per-class FP
// rows charge only the class's own unit.
ConfusionCounts count_outcomes(const std::vector<TriggerPoint>& triggers,
                               const std::vector<Interval>& intervals,
                               const std::array<double, kNumAnomalies>& thresholds);

struct Metrics {
    std::optional<double> sensitivity;
    std::optional<double> specificity;
    std::optional<double> ppv;
    std::optional<double> npv;
    std::optional<double> mtbfp_s;  // nullopt = no false positives (infinite)
};

Metrics compute_metrics(const ConfusionRow& row, double normal_duration_s);

struct MetricReport {
    ConfusionCounts counts;
    std::array<Metrics, kNumAnomalies> per_class;
    Metrics overall;
};

MetricReport build_report(const ConfusionCounts& counts);
std::string report_to_json(const MetricReport& report);
// Five anomaly rows plus an overall row, percentage formatted.
std::string report_table_text(const MetricReport& report);

} // namespace ecgres
