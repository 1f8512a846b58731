#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mimo/metric_table.hpp"

namespace mimo {

enum class Statistic { mean, median };

const char* to_string(Statistic statistic);
Statistic parse_statistic(const std::string& text);

struct BootstrapConfig {
    std::size_t resamples = 1000;
    Statistic statistic = Statistic::mean;
    std::uint64_t seed = 0;
    double percentile = 50.0;  // strictly inside (0, 100)

    void validate() const;
};

/// 1-based rank into estimates sorted in DESCENDING order:
/// ceil(percentile / 100 * count), clamped to [1, count].
/// Percentile 95 therefore selects from the low tail, 5 from the high tail.
std::size_t descending_rank(double percentile, std::size_t count);

/// Value at descending_rank(percentile, n) of the raw values. No resampling.
double empirical_percentile(std::span<const double> values, double percentile);

/// The `resamples` bootstrap estimates in draw order. Values are put in
/// ascending order before resampling, so the result depends only on the
/// multiset of inputs and the seed. Each estimate is clamped to
/// [min(values), max(values)].
std::vector<double> bootstrap_estimates(std::span<const double> values, const BootstrapConfig& config);

/// Bootstrap estimate at descending_rank(config.percentile, config.resamples).
/// Throws on empty or non-finite input.
double bootstrap_percentile(std::span<const double> values, const BootstrapConfig& config);

enum class BoundCheck {
    at_least,  // bound >= threshold
    at_most,   // bound <= threshold
};

/// Same decision as comparing bootstrap_percentile() against `threshold`, but
/// stops drawing as soon as the outcome is settled.
bool bootstrap_bound_meets(std::span<const double> values, const BootstrapConfig& config, double threshold,
                           BoundCheck check);

/// Per-organ Dice and HD thresholds.
struct ThresholdSet {
    std::vector<std::string> organs;
    std::vector<double> dice;
    std::vector<double> hd;  // +inf only for organs whose HD column had no finite value
    double dice_percentile = 50.0;
    double hd_percentile = 50.0;
    std::uint64_t seed = 0;
    std::size_t resamples = 1000;
    Statistic statistic = Statistic::mean;
    bool bootstrapped = true;
    std::string source;

    std::size_t organ_count() const { return organs.size(); }
};

struct ThresholdOptions {
    double dice_percentile = 50.0;
    double hd_percentile = 50.0;
    std::size_t resamples = 1000;
    Statistic statistic = Statistic::mean;
    std::uint64_t seed = 0;
    // false: thresholds are empirical column percentiles (no resampling).
    bool use_bootstrap = true;
    // false: an organ whose HD column is entirely +inf is an error.
    // true: its HD threshold becomes +inf; screening still fails every
    // infinite HD, so such an organ can never qualify.
    bool allow_infinite_hd_columns = false;
    std::string source;
};

/// Thresholds for every organ of `table`. Organ j draws from sub-seed
/// derive_seed(seed, {threshold, j, indicator}), so the result does not
/// depend on the percentile or on evaluation order.
ThresholdSet generate_thresholds(const MetricTable& table, const ThresholdOptions& options = {});

}  // namespace mimo
