#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mimo/bootstrap.hpp"
#include "mimo/metric_table.hpp"
#include "mimo/screening.hpp"

namespace mimo {

struct NamedTable {
    std::string name;
    MetricTable table;
};

struct RobustnessConfig {
    std::size_t trials_inner = 100;
    std::size_t trials_outer = 20;
    std::uint64_t seed = 0;
    double split_fraction = 0.5;  // share of samples used to derive thresholds
    bool ablation = false;        // disable bootstrap in thresholds and screening
    double dice_percentile = 50.0;
    double hd_percentile = 50.0;
    CiPercentiles ci;
    std::size_t resamples = 1000;
    Statistic statistic = Statistic::mean;
    unsigned threads = 0;

    void validate() const;
};

struct RobustnessReport {
    std::vector<std::string> models;
    std::vector<double> reference_scores;
    std::vector<std::size_t> reference_positions;  // 0 = best
    std::vector<std::string> reference_ranking;     // model names, best first
    std::vector<double> mean_percent;
    std::vector<double> std_percent;  // sample standard deviation over outer repetitions
    std::vector<std::vector<double>> outer_percent;  // [model][outer]
    RobustnessConfig config;
};

/// Rank position of each model (0 = best) by descending score; equal scores
/// are ordered by ascending name.
std::vector<std::size_t> rank_positions(std::span<const std::string> names, std::span<const double> scores);

/// Samples in the threshold half for n samples: ceil(n * fraction), kept in [1, n - 1].
std::size_t threshold_half_size(std::size_t n, double fraction);

/// Self-thresholded MIMO score, as used for both the reference ranking and each trial.
double self_score(const MetricTable& threshold_rows, const MetricTable& scored_rows, std::uint64_t seed,
                  const RobustnessConfig& config);

/// Split-half rank-violation experiment. Every inner trial draws one split
/// shared by all models; thresholds come from the first part, scores from
/// the second, and a model violates when its rank position differs from the
/// full-table reference.
RobustnessReport robustness_experiment(std::span<const NamedTable> models, const RobustnessConfig& config);

}  // namespace mimo
