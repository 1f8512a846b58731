#include "mimo/serialize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "mimo/error.hpp"
#include "mimo/metric_table.hpp"

namespace mimo {
using json = nlohmann::ordered_json;

namespace {

json number(double value) {
    if (std::isfinite(value)) return value;
    return format_number(value);
}

double read_number(const json& value, const std::string& what) {
    if (value.is_number()) return value.get<double>();
    if (value.is_string()) {
        const auto text = value.get<std::string>();
        if (text == "inf") return std::numeric_limits<double>::infinity();
    }
    throw Error("thresholds: '" + what + "' must be a number or \"inf\"");
}

json thresholds_object(const ThresholdSet& t) {
    json doc;
    doc["seed"] = t.seed;
    doc["b"] = t.resamples;
    doc["statistic"] = to_string(t.statistic);
    doc["bootstrapped"] = t.bootstrapped;
    doc["dice_percentile"] = t.dice_percentile;
    doc["hd_percentile"] = t.hd_percentile;
    doc["source"] = t.source;
    json organs = json::object();
    for (std::size_t j = 0; j < t.organ_count(); ++j) organs[t.organs[j]] = {{"dice", number(t.dice[j])}, {"hd", number(t.hd[j])}};
    doc["organs"] = std::move(organs);
    return doc;
}

}  // namespace

std::string thresholds_to_json(const ThresholdSet& thresholds) { return thresholds_object(thresholds).dump(2) + "\n"; }

ThresholdSet thresholds_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const std::exception& e) {
        throw Error(std::string("thresholds: invalid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("organs") || !doc["organs"].is_object())
        throw Error("thresholds: expected an object with an 'organs' object");

    ThresholdSet t;
    try {
        if (doc.contains("seed")) t.seed = doc["seed"].get<std::uint64_t>();
        if (doc.contains("b")) t.resamples = doc["b"].get<std::size_t>();
        if (doc.contains("statistic")) t.statistic = parse_statistic(doc["statistic"].get<std::string>());
        if (doc.contains("bootstrapped")) t.bootstrapped = doc["bootstrapped"].get<bool>();
        if (doc.contains("dice_percentile")) t.dice_percentile = doc["dice_percentile"].get<double>();
        if (doc.contains("hd_percentile")) t.hd_percentile = doc["hd_percentile"].get<double>();
        if (doc.contains("source")) t.source = doc["source"].get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("thresholds: bad metadata field: ") + e.what());
    }
    for (const auto& [organ, entry] : doc["organs"].items()) {
        if (!entry.is_object() || !entry.contains("dice") || !entry.contains("hd"))
            throw Error("thresholds: organ '" + organ + "' needs 'dice' and 'hd'");
        t.organs.push_back(organ);
        t.dice.push_back(read_number(entry["dice"], organ + ".dice"));
        t.hd.push_back(read_number(entry["hd"], organ + ".hd"));
        if (std::isnan(t.dice.back()) || std::isnan(t.hd.back())) throw Error("thresholds: NaN for '" + organ + "'");
    }
    if (t.organs.empty()) throw Error("thresholds: no organs");
    return t;
}

std::string report_to_json(const MimoReport& report, const MetricTable& table) {
    json doc;
    doc["score"] = report.score;
    doc["qualified_count"] = report.qualified_count;
    doc["total"] = report.total;
    doc["config"] = {{"ci_dice", report.options.ci.dice},
                     {"ci_hd", report.options.ci.hd},
                     {"b", report.options.resamples},
                     {"statistic", to_string(report.options.statistic)},
                     {"seed", report.options.seed},
                     {"bootstrap", report.options.use_bootstrap}};
    doc["thresholds"] = thresholds_object(report.thresholds);

    json organs = json::array();
    for (std::size_t j = 0; j < report.organs.size(); ++j) {
        const auto& r = report.organs[j];
        const auto t = static_cast<std::size_t>(
            std::find(report.thresholds.organs.begin(), report.thresholds.organs.end(), r.organ) -
            report.thresholds.organs.begin());
        json organ;
        organ["organ"] = r.organ;
        organ["dice_threshold"] = number(report.thresholds.dice.at(t));
        organ["hd_threshold"] = number(report.thresholds.hd.at(t));
        organ["dice_prefix"] = r.dice_prefix;
        organ["hd_prefix"] = r.hd_prefix;
        organ["qualified"] = r.qualified;
        organ["min_confidence"] = r.min_confidence ? json(*r.min_confidence) : json(nullptr);
        json samples = json::array();
        for (std::size_t k = 0; k < r.sorted_order.size(); ++k) {
            const std::size_t row = r.sorted_order[k];
            json sample;
            sample["sample_id"] = table.sample_ids()[row];
            sample["conf"] = number(table.conf(row, j));
            sample["dice"] = number(table.dice(row, j));
            sample["hd"] = number(table.hd(row, j));
            if (!r.dice_bounds.empty()) sample["dice_bound"] = number(r.dice_bounds[k]);
            if (!r.hd_bounds.empty()) sample["hd_bound"] = number(r.hd_bounds[k]);
            sample["passed"] = static_cast<bool>(r.passed[row]);
            samples.push_back(std::move(sample));
        }
        organ["samples"] = std::move(samples);
        organs.push_back(std::move(organ));
    }
    doc["organs"] = std::move(organs);
    return doc.dump(2) + "\n";
}

std::string report_to_csv(const MimoReport& report, const MetricTable& table) {
    std::ostringstream out;
    out << "organ,sample_id,conf,dice,hd,passed\n";
    for (std::size_t j = 0; j < report.organs.size(); ++j) {
        const auto& r = report.organs[j];
        for (const std::size_t row : r.sorted_order)
            out << r.organ << ',' << table.sample_ids()[row] << ',' << format_number(table.conf(row, j)) << ','
                << format_number(table.dice(row, j)) << ',' << format_number(table.hd(row, j)) << ','
                << (r.passed[row] ? 1 : 0) << '\n';
    }
    return out.str();
}

std::string calibration_to_json(const CalibrationReport& report) {
    json doc;
    doc["ece"] = report.ece;
    doc["mce"] = report.mce;
    doc["level"] = to_string(report.level);
    doc["correctness_metric"] = report.correctness_metric;
    doc["gaps"] = report.per_sample_gaps;
    return doc.dump(2) + "\n";
}

std::string robustness_to_json(const RobustnessReport& report) {
    const auto& c = report.config;
    json doc;
    doc["config"] = {{"trials_inner", c.trials_inner},
                     {"trials_outer", c.trials_outer},
                     {"seed", c.seed},
                     {"split_fraction", c.split_fraction},
                     {"bootstrap", !c.ablation},
                     {"dice_percentile", c.dice_percentile},
                     {"hd_percentile", c.hd_percentile},
                     {"ci_dice", c.ci.dice},
                     {"ci_hd", c.ci.hd},
                     {"b", c.resamples},
                     {"statistic", to_string(c.statistic)}};
    doc["reference_ranking"] = report.reference_ranking;
    json models = json::array();
    for (std::size_t k = 0; k < report.models.size(); ++k) {
        models.push_back({{"model", report.models[k]},
                          {"reference_score", report.reference_scores[k]},
                          {"reference_position", report.reference_positions[k] + 1},
                          {"mean_percent", report.mean_percent[k]},
                          {"std_percent", report.std_percent[k]},
                          {"outer_percent", report.outer_percent[k]}});
    }
    doc["models"] = std::move(models);
    return doc.dump(2) + "\n";
}

std::string robustness_to_csv(const RobustnessReport& report) {
    std::ostringstream out;
    out << "model,mean_percent,std_percent\n";
    for (std::size_t k = 0; k < report.models.size(); ++k)
        out << report.models[k] << ',' << format_number(report.mean_percent[k]) << ','
            << format_number(report.std_percent[k]) << '\n';
    return out.str();
}

}  // namespace mimo
