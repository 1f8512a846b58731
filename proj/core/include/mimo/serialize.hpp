#pragma once

#include <string>

#include "mimo/bootstrap.hpp"
#include "mimo/calibration.hpp"
#include "mimo/robustness.hpp"
#include "mimo/screening.hpp"

// JSON and CSV encodings of reports. JSON uses insertion-ordered objects so
// organs and models appear in table order; non-finite numbers are written as
// the string "inf" and undefined values as null.
namespace mimo {

std::string thresholds_to_json(const ThresholdSet& thresholds);
ThresholdSet thresholds_from_json(const std::string& text);

std::string report_to_json(const MimoReport& report, const MetricTable& table);
/// `organ,sample_id,conf,dice,hd,passed`, organs in table order, samples by descending confidence.
std::string report_to_csv(const MimoReport& report, const MetricTable& table);

std::string calibration_to_json(const CalibrationReport& report);

std::string robustness_to_json(const RobustnessReport& report);
/// `model,mean_percent,std_percent`
std::string robustness_to_csv(const RobustnessReport& report);

}  // namespace mimo
