#include "mimo/screening.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mimo/error.hpp"
#include "mimo/rng.hpp"

namespace mimo {
namespace {

struct PrefixRule {
    BoundCheck check;
    double threshold;
    double percentile;
    std::uint64_t indicator;
};

struct PrefixEngine {
    const ScreeningOptions& options;
    std::size_t organ_index;

    BootstrapConfig config(const PrefixRule& rule, std::size_t length) const {
        BootstrapConfig c;
        c.resamples = options.resamples;
        c.statistic = options.statistic;
        c.percentile = rule.percentile;
        c.seed = derive_seed(options.seed, {seed_tag::prefix_bound, organ_index, rule.indicator, length});
        return c;
    }

    double bound(std::span<const double> prefix, const PrefixRule& rule) const {
        if (!options.use_bootstrap) return empirical_percentile(prefix, rule.percentile);
        return bootstrap_percentile(prefix, config(rule, prefix.size()));
    }

    bool meets(std::span<const double> prefix, const PrefixRule& rule) const {
        if (!options.use_bootstrap) {
            const double b = empirical_percentile(prefix, rule.percentile);
            return rule.check == BoundCheck::at_least ? b >= rule.threshold : b <= rule.threshold;
        }
        return bootstrap_bound_meets(prefix, config(rule, prefix.size()), rule.threshold, rule.check);
    }

    static bool satisfied(double bound, const PrefixRule& rule) {
        if (!std::isfinite(bound)) return false;
        return rule.check == BoundCheck::at_least ? bound >= rule.threshold : bound <= rule.threshold;
    }

    // Largest prefix length whose bound satisfies the rule; prefixes longer
    // than `finite_len` contain an infinite value and never satisfy it. When
    // `bounds` is non-null every prefix bound is materialised.
    std::size_t largest_prefix(std::span<const double> sorted_values, std::size_t finite_len, const PrefixRule& rule,
                               std::vector<double>* bounds) const {
        const std::size_t n = sorted_values.size();
        if (bounds) {
            bounds->assign(n, std::numeric_limits<double>::infinity());
            std::size_t best = 0;
            for (std::size_t i = 1; i <= finite_len; ++i) {
                (*bounds)[i - 1] = bound(sorted_values.first(i), rule);
                if (satisfied((*bounds)[i - 1], rule)) best = i;
            }
            return best;
        }
        // Largest satisfying prefix: scan down from the longest candidate.
        for (std::size_t i = finite_len; i >= 1; --i)
            if (meets(sorted_values.first(i), rule)) return i;
        return 0;
    }
};

std::size_t finite_prefix_length(std::span<const double> values) {
    std::size_t i = 0;
    while (i < values.size() && std::isfinite(values[i])) ++i;
    return i;
}

void check_ci(const CiPercentiles& ci) {
    if (!(ci.dice > 0.0 && ci.dice < 100.0)) throw Error("dice CI percentile must lie inside (0, 100)");
    if (!(ci.hd > 0.0 && ci.hd < 100.0)) throw Error("hd CI percentile must lie inside (0, 100)");
}

}  // namespace

std::vector<std::size_t> confidence_order(std::span<const double> conf, std::span<const std::string> sample_ids) {
    if (conf.size() != sample_ids.size()) throw Error("confidence and sample id columns differ in length");
    std::vector<std::size_t> order(conf.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (conf[a] != conf[b]) return conf[a] > conf[b];
        return sample_ids[a] < sample_ids[b];
    });
    return order;
}

OrganScreenResult screen_organ(const OrganColumns& columns, double t_dice, double t_hd, std::size_t organ_index,
                               const ScreeningOptions& options) {
    const std::size_t n = columns.dice.size();
    if (n == 0) throw Error("screen_organ: empty columns");
    if (columns.hd.size() != n || columns.conf.size() != n || columns.sample_ids.size() != n)
        throw Error("screen_organ: column lengths differ");
    for (std::size_t i = 0; i < n; ++i)
        if (std::isnan(columns.dice[i]) || std::isnan(columns.hd[i]) || std::isnan(columns.conf[i]))
            throw Error("screen_organ: NaN in column for sample '" + columns.sample_ids[i] + "'");
    if (std::isnan(t_dice) || std::isnan(t_hd)) throw Error("screen_organ: NaN threshold");
    for (double d : columns.dice)
        if (!std::isfinite(d)) throw Error("screen_organ: non-finite Dice value");
    check_ci(options.ci);
    if (options.resamples < 1) throw Error("screen_organ: resample count must be at least 1");

    OrganScreenResult result;
    result.sorted_order = confidence_order(columns.conf, columns.sample_ids);
    std::vector<double> dice_sorted(n), hd_sorted(n);
    for (std::size_t k = 0; k < n; ++k) {
        dice_sorted[k] = columns.dice[result.sorted_order[k]];
        hd_sorted[k] = columns.hd[result.sorted_order[k]];
    }

    const PrefixEngine engine{options, organ_index};
    const PrefixRule dice_rule{BoundCheck::at_least, t_dice, options.ci.dice, seed_tag::dice};
    const PrefixRule hd_rule{BoundCheck::at_most, t_hd, options.ci.hd, seed_tag::hd};
    result.dice_prefix = engine.largest_prefix(dice_sorted, n, dice_rule,
                                               options.record_bounds ? &result.dice_bounds : nullptr);
    result.hd_prefix = engine.largest_prefix(hd_sorted, finite_prefix_length(hd_sorted), hd_rule,
                                             options.record_bounds ? &result.hd_bounds : nullptr);
    result.qualified = std::min(result.dice_prefix, result.hd_prefix);

    result.passed.assign(n, false);
    for (std::size_t k = 0; k < result.qualified; ++k) result.passed[result.sorted_order[k]] = true;
    if (result.qualified > 0) result.min_confidence = columns.conf[result.sorted_order[result.qualified - 1]];
    return result;
}

MimoReport mimo_score(const MetricTable& table, const ThresholdSet& thresholds, const ScreeningOptions& options) {
    table.validate();
    const std::size_t n = table.sample_count(), m = table.organ_count();
    if (thresholds.organ_count() != m || thresholds.dice.size() != m || thresholds.hd.size() != m)
        throw Error("thresholds cover " + std::to_string(thresholds.organ_count()) + " organs, table has " +
                    std::to_string(m));

    MimoReport report;
    report.sample_ids = table.sample_ids();
    report.thresholds = thresholds;
    report.options = options;
    report.total = n * m;
    for (std::size_t j = 0; j < m; ++j) {
        const auto& organ = table.organs()[j];
        const auto it = std::find(thresholds.organs.begin(), thresholds.organs.end(), organ);
        if (it == thresholds.organs.end()) throw Error("no threshold for organ '" + organ + "'");
        const auto t = static_cast<std::size_t>(it - thresholds.organs.begin());

        const auto dice = table.dice_column(j), hd = table.hd_column(j), conf = table.conf_column(j);
        OrganColumns columns{dice, hd, conf, table.sample_ids()};
        auto result = screen_organ(columns, thresholds.dice[t], thresholds.hd[t], j, options);
        result.organ = organ;
        report.qualified_count += result.qualified;
        report.organs.push_back(std::move(result));
    }
    report.score = static_cast<double>(report.qualified_count) / static_cast<double>(report.total);
    return report;
}

MimoReport score_without_bootstrap(const MetricTable& table, const ThresholdSet& thresholds, const CiPercentiles& ci) {
    ScreeningOptions options;
    options.ci = ci;
    options.use_bootstrap = false;
    return mimo_score(table, thresholds, options);
}

double usable_region(std::span<const double> metric, std::span<const double> conf,
                     std::span<const std::string> sample_ids, double requirement, Direction direction,
                     const UsableRegionOptions& options) {
    const std::size_t n = metric.size();
    if (n == 0) throw Error("usable_region: empty column");
    if (conf.size() != n || sample_ids.size() != n) throw Error("usable_region: column lengths differ");
    for (std::size_t i = 0; i < n; ++i)
        if (std::isnan(metric[i]) || std::isnan(conf[i])) throw Error("usable_region: NaN in column");
    if (std::isnan(requirement)) throw Error("usable_region: NaN requirement");
    if (!(options.ci_percentile > 0.0 && options.ci_percentile < 100.0))
        throw Error("usable_region: CI percentile must lie inside (0, 100)");

    const auto order = confidence_order(conf, sample_ids);
    std::vector<double> sorted(n);
    for (std::size_t k = 0; k < n; ++k) sorted[k] = metric[order[k]];

    ScreeningOptions screening;
    screening.resamples = options.resamples;
    screening.statistic = options.statistic;
    screening.seed = options.seed;
    screening.use_bootstrap = options.use_bootstrap;
    const PrefixEngine engine{screening, options.organ_index};
    const bool higher = direction == Direction::higher_better;
    const PrefixRule rule{higher ? BoundCheck::at_least : BoundCheck::at_most, requirement, options.ci_percentile,
                          higher ? seed_tag::dice : seed_tag::hd};
    const std::size_t usable = engine.largest_prefix(sorted, finite_prefix_length(sorted), rule, nullptr);
    return static_cast<double>(usable) / static_cast<double>(n);
}

}  // namespace mimo
