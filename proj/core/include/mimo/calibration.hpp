#pragma once

#include <span>
#include <string>
#include <vector>

#include "mimo/metric_table.hpp"

namespace mimo {

/// Mean of |score_i - conf_i|.
double ece(std::span<const double> scores, std::span<const double> confs);
/// Max of |score_i - conf_i|.
double mce(std::span<const double> scores, std::span<const double> confs);

enum class CalibrationLevel {
    per_sample,        // s_i = row-mean Dice, conf_i = row-mean confidence
    per_sample_organ,  // one pair per table cell
};

struct CalibrationReport {
    double ece = 0.0;
    double mce = 0.0;
    std::vector<double> per_sample_gaps;
    std::string correctness_metric = "dice";
    CalibrationLevel level = CalibrationLevel::per_sample;
};

CalibrationReport calibration_report(const MetricTable& table,
                                     CalibrationLevel level = CalibrationLevel::per_sample);

const char* to_string(CalibrationLevel level);

}  // namespace mimo
