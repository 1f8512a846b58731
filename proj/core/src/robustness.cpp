#include "mimo/robustness.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "mimo/error.hpp"
#include "mimo/parallel.hpp"
#include "mimo/rng.hpp"

namespace mimo {

void RobustnessConfig::validate() const {
    if (trials_inner < 1 || trials_outer < 1) throw Error("robustness: trial counts must be at least 1");
    if (!(split_fraction > 0.0 && split_fraction < 1.0)) throw Error("robustness: split fraction must lie inside (0, 1)");
    if (!(dice_percentile > 0.0 && dice_percentile < 100.0) || !(hd_percentile > 0.0 && hd_percentile < 100.0))
        throw Error("robustness: threshold percentiles must lie inside (0, 100)");
    if (!(ci.dice > 0.0 && ci.dice < 100.0) || !(ci.hd > 0.0 && ci.hd < 100.0))
        throw Error("robustness: CI percentiles must lie inside (0, 100)");
    if (resamples < 1) throw Error("robustness: resample count must be at least 1");
}

std::vector<std::size_t> rank_positions(std::span<const std::string> names, std::span<const double> scores) {
    if (names.size() != scores.size()) throw Error("rank_positions: names and scores differ in length");
    std::vector<std::size_t> order(names.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return names[a] < names[b];
    });
    std::vector<std::size_t> positions(names.size());
    for (std::size_t k = 0; k < order.size(); ++k) positions[order[k]] = k;
    return positions;
}

std::size_t threshold_half_size(std::size_t n, double fraction) {
    if (n < 2) throw Error("robustness: need at least 2 samples to split, have " + std::to_string(n));
    const auto raw = static_cast<std::size_t>(std::ceil(static_cast<double>(n) * fraction));
    return std::clamp<std::size_t>(raw, 1, n - 1);
}

double self_score(const MetricTable& threshold_rows, const MetricTable& scored_rows, std::uint64_t seed,
                  const RobustnessConfig& config) {
    ThresholdOptions thresholds;
    thresholds.dice_percentile = config.dice_percentile;
    thresholds.hd_percentile = config.hd_percentile;
    thresholds.resamples = config.resamples;
    thresholds.statistic = config.statistic;
    thresholds.seed = seed;
    thresholds.use_bootstrap = !config.ablation;
    thresholds.allow_infinite_hd_columns = true;

    ScreeningOptions screening;
    screening.ci = config.ci;
    screening.resamples = config.resamples;
    screening.statistic = config.statistic;
    screening.seed = seed;
    screening.use_bootstrap = !config.ablation;
    screening.record_bounds = false;

    return mimo_score(scored_rows, generate_thresholds(threshold_rows, thresholds), screening).score;
}

namespace {

// Row-aligns every table to the first model's sample order.
std::vector<MetricTable> aligned_tables(std::span<const NamedTable> models) {
    const auto& first = models.front().table;
    std::vector<MetricTable> out;
    for (const auto& model : models) {
        model.table.validate();
        if (model.table.organs() != first.organs())
            throw Error("robustness: model '" + model.name + "' has a different organ list than '" +
                        models.front().name + "'");
        if (model.table.sample_count() != first.sample_count())
            throw Error("robustness: model '" + model.name + "' has a different number of samples");
        std::map<std::string, std::size_t> rows;
        for (std::size_t s = 0; s < model.table.sample_count(); ++s) rows[model.table.sample_ids()[s]] = s;
        std::vector<std::size_t> order;
        for (const auto& id : first.sample_ids()) {
            const auto it = rows.find(id);
            if (it == rows.end()) throw Error("robustness: model '" + model.name + "' lacks sample '" + id + "'");
            order.push_back(it->second);
        }
        out.push_back(model.table.select_rows(order));
    }
    return out;
}

}  // namespace

RobustnessReport robustness_experiment(std::span<const NamedTable> models, const RobustnessConfig& config) {
    config.validate();
    if (models.size() < 2) throw Error("robustness: need at least 2 models, have " + std::to_string(models.size()));
    std::vector<std::string> names;
    for (const auto& model : models) names.push_back(model.name);
    {
        auto sorted = names;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw Error("robustness: model names must be unique");
    }
    const auto tables = aligned_tables(models);
    const std::size_t n = tables.front().sample_count();
    const std::size_t half = threshold_half_size(n, config.split_fraction);
    const std::size_t k_models = tables.size();

    RobustnessReport report;
    report.models = names;
    report.config = config;
    const std::uint64_t reference_seed = derive_seed(config.seed, {seed_tag::reference});
    for (const auto& table : tables) report.reference_scores.push_back(self_score(table, table, reference_seed, config));
    report.reference_positions = rank_positions(names, report.reference_scores);
    report.reference_ranking.resize(k_models);
    for (std::size_t k = 0; k < k_models; ++k) report.reference_ranking[report.reference_positions[k]] = names[k];

    const std::size_t trials = config.trials_outer * config.trials_inner;
    std::vector<std::uint8_t> violated(trials * k_models, 0);
    parallel_for(trials, config.threads, [&](std::size_t trial) {
        const std::size_t outer = trial / config.trials_inner, inner = trial % config.trials_inner;
        const std::uint64_t trial_seed = derive_seed(config.seed, {seed_tag::trial, outer, inner});

        // One split per trial, shared by all models.
        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        Rng rng(derive_seed(trial_seed, {seed_tag::split}));
        for (std::size_t i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
        std::vector<std::size_t> part_a(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(half));
        std::vector<std::size_t> part_b(perm.begin() + static_cast<std::ptrdiff_t>(half), perm.end());
        std::sort(part_a.begin(), part_a.end());
        std::sort(part_b.begin(), part_b.end());

        std::vector<double> scores(k_models);
        for (std::size_t k = 0; k < k_models; ++k)
            scores[k] = self_score(tables[k].select_rows(part_a), tables[k].select_rows(part_b), trial_seed, config);
        const auto positions = rank_positions(names, scores);
        for (std::size_t k = 0; k < k_models; ++k)
            violated[trial * k_models + k] = positions[k] != report.reference_positions[k] ? 1 : 0;
    });

    report.outer_percent.assign(k_models, std::vector<double>(config.trials_outer, 0.0));
    for (std::size_t k = 0; k < k_models; ++k) {
        for (std::size_t o = 0; o < config.trials_outer; ++o) {
            std::size_t count = 0;
            for (std::size_t i = 0; i < config.trials_inner; ++i)
                count += violated[(o * config.trials_inner + i) * k_models + k];
            report.outer_percent[k][o] =
                100.0 * static_cast<double>(count) / static_cast<double>(config.trials_inner);
        }
        const auto& values = report.outer_percent[k];
        double mean = 0.0;
        for (double v : values) mean += v;
        mean /= static_cast<double>(values.size());
        mean = std::clamp(mean, *std::min_element(values.begin(), values.end()),
                          *std::max_element(values.begin(), values.end()));
        double var = 0.0;
        for (double v : values) var += (v - mean) * (v - mean);
        const double sd = values.size() > 1 ? std::sqrt(var / static_cast<double>(values.size() - 1)) : 0.0;
        report.mean_percent.push_back(mean);
        report.std_percent.push_back(sd);
    }
    return report;
}

}  // namespace mimo
