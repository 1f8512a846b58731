#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mimo/bootstrap.hpp"
#include "mimo/metric_table.hpp"

namespace mimo {

struct CiPercentiles {
    double dice = 95.0;
    double hd = 5.0;
};

struct ScreeningOptions {
    CiPercentiles ci;
    std::size_t resamples = 1000;
    Statistic statistic = Statistic::mean;
    std::uint64_t seed = 0;
    // false: prefix bounds are empirical percentiles of the prefix values.
    bool use_bootstrap = true;
    // false: skip materialising per-prefix bounds and only determine the
    // qualified prefix lengths. Counts and pass/fail are identical either way.
    bool record_bounds = true;
};

/// Result of screening one organ column.
///
/// `sorted_order` holds table row indices by descending confidence (ties by
/// ascending sample id). `passed[row]` is true exactly for the first
/// `qualified` entries of `sorted_order`.
struct OrganScreenResult {
    std::string organ;
    std::vector<std::size_t> sorted_order;
    std::vector<double> dice_bounds;  // per prefix length 1..n; empty unless recorded
    std::vector<double> hd_bounds;
    std::size_t dice_prefix = 0;
    std::size_t hd_prefix = 0;
    std::size_t qualified = 0;
    std::optional<double> min_confidence;
    std::vector<bool> passed;
};

struct OrganColumns {
    std::span<const double> dice;
    std::span<const double> hd;
    std::span<const double> conf;
    std::span<const std::string> sample_ids;
};

/// Confidence-sorted prefix screening of one organ.
///
/// For every prefix length i the Dice bound is the CI percentile of the
/// first i Dice values, and the HD bound likewise over HD values (+inf if
/// the prefix holds any infinite HD). The qualified prefix is
/// min(largest i with dice bound >= t_dice, largest i with a finite hd
/// bound <= t_hd). Bounds for prefix i use the sub-seed
/// derive_seed(seed, {prefix_bound, organ_index, indicator, i}).
OrganScreenResult screen_organ(const OrganColumns& columns, double t_dice, double t_hd, std::size_t organ_index,
                               const ScreeningOptions& options = {});

/// Descending confidence order, ties by ascending sample id.
std::vector<std::size_t> confidence_order(std::span<const double> conf, std::span<const std::string> sample_ids);

struct MimoReport {
    double score = 0.0;
    std::size_t qualified_count = 0;
    std::size_t total = 0;
    std::vector<std::string> sample_ids;
    std::vector<OrganScreenResult> organs;
    ThresholdSet thresholds;
    ScreeningOptions options;
};

/// Screens every organ; score = qualified_count / (n * m).
MimoReport mimo_score(const MetricTable& table, const ThresholdSet& thresholds, const ScreeningOptions& options = {});

/// mimo_score with bootstrap disabled in the screening step.
MimoReport score_without_bootstrap(const MetricTable& table, const ThresholdSet& thresholds,
                                   const CiPercentiles& ci = {});

enum class Direction { higher_better, lower_better };

struct UsableRegionOptions {
    double ci_percentile = 95.0;
    std::size_t resamples = 1000;
    Statistic statistic = Statistic::mean;
    std::uint64_t seed = 0;
    bool use_bootstrap = true;
    std::size_t organ_index = 0;  // seed key, matches screen_organ's
};

/// Usable Region Estimate: largest confidence-sorted prefix whose CI bound
/// meets `requirement`, as a fraction of n.
double usable_region(std::span<const double> metric, std::span<const double> conf,
                     std::span<const std::string> sample_ids, double requirement, Direction direction,
                     const UsableRegionOptions& options = {});

}  // namespace mimo
