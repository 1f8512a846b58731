#include "mimo/calibration.hpp"

#include <algorithm>
#include <cmath>

#include "mimo/error.hpp"

namespace mimo {
namespace {

std::vector<double> gaps(std::span<const double> scores, std::span<const double> confs) {
    if (scores.size() != confs.size())
        throw Error("calibration: " + std::to_string(scores.size()) + " scores but " + std::to_string(confs.size()) +
                    " confidences");
    if (scores.empty()) throw Error("calibration: empty input");
    std::vector<double> out(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (!std::isfinite(scores[i]) || !std::isfinite(confs[i])) throw Error("calibration: non-finite input");
        out[i] = std::abs(scores[i] - confs[i]);
    }
    return out;
}

double mean_of(const std::vector<double>& values) {
    double sum = 0.0;
    for (double v : values) sum += v;
    // The mean of values in [0, max] cannot exceed max; guard the rounding.
    const double mean = sum / static_cast<double>(values.size());
    return std::min(mean, *std::max_element(values.begin(), values.end()));
}

}  // namespace

double ece(std::span<const double> scores, std::span<const double> confs) { return mean_of(gaps(scores, confs)); }

double mce(std::span<const double> scores, std::span<const double> confs) {
    const auto g = gaps(scores, confs);
    return *std::max_element(g.begin(), g.end());
}

CalibrationReport calibration_report(const MetricTable& table, CalibrationLevel level) {
    std::vector<double> scores, confs;
    const std::size_t n = table.sample_count(), m = table.organ_count();
    if (level == CalibrationLevel::per_sample) {
        for (std::size_t s = 0; s < n; ++s) {
            double dice_sum = 0.0, conf_sum = 0.0;
            for (std::size_t j = 0; j < m; ++j) {
                dice_sum += table.dice(s, j);
                conf_sum += table.conf(s, j);
            }
            scores.push_back(dice_sum / static_cast<double>(m));
            confs.push_back(conf_sum / static_cast<double>(m));
        }
    } else {
        for (std::size_t s = 0; s < n; ++s)
            for (std::size_t j = 0; j < m; ++j) {
                scores.push_back(table.dice(s, j));
                confs.push_back(table.conf(s, j));
            }
    }
    CalibrationReport report;
    report.level = level;
    report.per_sample_gaps = gaps(scores, confs);
    report.ece = mean_of(report.per_sample_gaps);
    report.mce = *std::max_element(report.per_sample_gaps.begin(), report.per_sample_gaps.end());
    return report;
}

const char* to_string(CalibrationLevel level) {
    return level == CalibrationLevel::per_sample ? "per-sample" : "per-sample-organ";
}

}  // namespace mimo
