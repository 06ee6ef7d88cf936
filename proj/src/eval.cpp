#include "ecgres/eval.hpp"

#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "ecgres/errors.hpp"

using nlohmann::json;

namespace ecgres {

ConfusionCounts count_outcomes(const std::vector<TriggerPoint>& triggers,
                               const std::vector<Interval>& intervals,
                               const std::array<double, kNumAnomalies>& thresholds) {
    ConfusionCounts counts;
    size_t k = 0;
    for (const auto& interval : intervals) {
        while (k < triggers.size() && triggers[k].time_s < interval.start_s)
            ++k;
        bool any_sample = false;
        bool any_unit = false;
        std::array<bool, kNumAnomalies> unit_fired = {};
        size_t j = k;
        while (j < triggers.size() && triggers[j].time_s < interval.end_s) {
            any_sample = true;
            for (int u = 0; u < kNumAnomalies; ++u) {
                if (triggers[j].scores[u] > thresholds[u]) {
                    unit_fired[u] = true;
                    any_unit = true;
                }
            }
            ++j;
        }
        k = j;
        if (!any_sample)
            throw Error(ErrorCode::Data,
                        "CoverageGap: no trigger sample inside interval starting at " +
                            std::to_string(interval.start_s) + " s");

        if (is_anomaly(interval.label)) {
            int cls = anomaly_index(interval.label);
            if (any_unit) {
                counts.per_class[cls].tp++;
                counts.overall.tp++;
            } else {
                counts.per_class[cls].fn++;
                counts.overall.fn++;
            }
        } else if (interval.label == BeatLabel::Normal) {
            counts.normal_duration_s += interval.end_s - interval.start_s;
            for (int u = 0; u < kNumAnomalies; ++u) {
                if (unit_fired[u])
                    counts.per_class[u].fp++;
                else
                    counts.per_class[u].tn++;
            }
            if (any_unit)
                counts.overall.fp++;
            else
                counts.overall.tn++;
        }
    }
    return counts;
}

Metrics compute_metrics(const ConfusionRow& row, double normal_duration_s) {
    Metrics m;
    auto ratio = [](int num, int den) -> std::optional<double> {
        if (den == 0)
            return std::nullopt;
        return static_cast<double>(num) / den;
    };
    m.sensitivity = ratio(row.tp, row.tp + row.fn);
    m.specificity = ratio(row.tn, row.tn + row.fp);
    m.ppv = ratio(row.tp, row.tp + row.fp);
    m.npv = ratio(row.tn, row.tn + row.fn);
    if (row.fp > 0)
        m.mtbfp_s = normal_duration_s / row.fp;
    return m;
}

MetricReport build_report(const ConfusionCounts& counts) {
    MetricReport report;
    report.counts = counts;
    for (int i = 0; i < kNumAnomalies; ++i)
        report.per_class[i] = compute_metrics(counts.per_class[i], counts.normal_duration_s);
    report.overall = compute_metrics(counts.overall, counts.normal_duration_s);
    return report;
}

namespace {

json metrics_json(const Metrics& m, const ConfusionRow& row) {
    auto opt = [](const std::optional<double>& v) {
        return v ? json(*v) : json(nullptr);
    };
    return json{{"tp", row.tp},
                {"fn", row.fn},
                {"fp", row.fp},
                {"tn", row.tn},
                {"sensitivity", opt(m.sensitivity)},
                {"specificity", opt(m.specificity)},
                {"ppv", opt(m.ppv)},
                {"npv", opt(m.npv)},
                {"mtbfp_s", opt(m.mtbfp_s)}};
}

} // namespace

std::string report_to_json(const MetricReport& report) {
    json j;
    j["version"] = 1;
    j["normal_duration_s"] = report.counts.normal_duration_s;
    for (int i = 0; i < kNumAnomalies; ++i)
        j["per_class"][label_name(anomaly_label(i))] =
            metrics_json(report.per_class[i], report.counts.per_class[i]);
    j["overall"] = metrics_json(report.overall, report.counts.overall);
    return j.dump(2) + "\n";
}

std::string report_table_text(const MetricReport& report) {
    std::string out;
    char line[256];
    std::snprintf(line, sizeof(line), "%-12s %11s %11s %8s %8s %10s\n", "class",
                  "sensitivity", "specificity", "ppv", "npv", "mtbfp[s]");
    out += line;
    auto fmt = [](const std::optional<double>& v, bool pct) -> std::string {
        if (!v)
            return pct ? "n/a" : "inf";
        char buf[32];
        if (pct)
            std::snprintf(buf, sizeof(buf), "%.2f%%", *v * 100.0);
        else
            std::snprintf(buf, sizeof(buf), "%.1f", *v);
        return buf;
    };
    auto row = [&](const char* name, const Metrics& m) {
        std::snprintf(line, sizeof(line), "%-12s %11s %11s %8s %8s %10s\n", name,
                      fmt(m.sensitivity, true).c_str(), fmt(m.specificity, true).c_str(),
                      fmt(m.ppv, true).c_str(), fmt(m.npv, true).c_str(),
                      fmt(m.mtbfp_s, false).c_str());
        out += line;
    };
    for (int i = 0; i < kNumAnomalies; ++i)
        row(label_name(anomaly_label(i)), report.per_class[i]);
    row("overall", report.overall);
    return out;
}

} // namespace ecgres
