#include "mimo/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "mimo/error.hpp"
#include "mimo/rng.hpp"

namespace mimo {

const char* to_string(Statistic statistic) { return statistic == Statistic::mean ? "mean" : "median"; }

Statistic parse_statistic(const std::string& text) {
    if (text == "mean") return Statistic::mean;
    if (text == "median") return Statistic::median;
    throw Error("unknown statistic '" + text + "' (expected mean or median)");
}

namespace {

void check_percentile(double percentile, const char* what) {
    if (!(percentile > 0.0 && percentile < 100.0))
        throw Error(std::string(what) + " percentile must lie strictly inside (0, 100), got " + std::to_string(percentile));
}

std::vector<double> sorted_finite(std::span<const double> values) {
    if (values.empty()) throw Error("bootstrap: empty input");
    std::vector<double> sorted(values.begin(), values.end());
    for (double v : sorted)
        if (!std::isfinite(v)) throw Error("bootstrap: non-finite value in input");
    std::sort(sorted.begin(), sorted.end());
    return sorted;
}

// Draws successive bootstrap estimates from an ascending copy of the data.
class Resampler {
public:
    Resampler(std::vector<double> sorted, const BootstrapConfig& config)
        : sorted_(std::move(sorted)), statistic_(config.statistic), rng_(config.seed) {
        if (sorted_.size() > (std::size_t{1} << 32)) throw Error("bootstrap: more than 2^32 values");
        if (statistic_ == Statistic::median) buffer_.resize(sorted_.size());
    }

    double low() const { return sorted_.front(); }
    double high() const { return sorted_.back(); }
    bool constant() const { return low() == high(); }

    double next() {
        const std::size_t n = sorted_.size();
        double estimate = 0.0;
        if (statistic_ == Statistic::mean) {
            double sum = 0.0;
            for (std::size_t k = 0; k < n; ++k) sum += sorted_[rng_.below_small(n)];
            estimate = sum / static_cast<double>(n);
        } else {
            for (std::size_t k = 0; k < n; ++k) buffer_[k] = sorted_[rng_.below_small(n)];
            const std::size_t mid = n / 2;
            std::nth_element(buffer_.begin(), buffer_.begin() + static_cast<std::ptrdiff_t>(mid), buffer_.end());
            estimate = buffer_[mid];
            if (n % 2 == 0) {
                const double lower = *std::max_element(buffer_.begin(), buffer_.begin() + static_cast<std::ptrdiff_t>(mid));
                estimate = lower + (estimate - lower) / 2.0;
            }
        }
        return std::clamp(estimate, low(), high());
    }

private:
    std::vector<double> sorted_;
    Statistic statistic_;
    Rng rng_;
    std::vector<double> buffer_;
};

double select_descending(std::vector<double>& values, std::size_t rank) {
    auto nth = values.begin() + static_cast<std::ptrdiff_t>(rank - 1);
    std::nth_element(values.begin(), nth, values.end(), std::greater<>());
    return *nth;
}

}  // namespace

void BootstrapConfig::validate() const {
    if (resamples < 1) throw Error("bootstrap: resample count must be at least 1");
    check_percentile(percentile, "bootstrap");
}

std::size_t descending_rank(double percentile, std::size_t count) {
    if (count == 0) throw Error("descending_rank: empty collection");
    // percentile * count first: exact for integral percentiles, so e.g. 95% of
    // 1000 is exactly rank 950.
    const double raw = std::ceil(percentile * static_cast<double>(count) / 100.0);
    if (!(raw >= 1.0)) return 1;
    if (raw >= static_cast<double>(count)) return count;
    return static_cast<std::size_t>(raw);
}

double empirical_percentile(std::span<const double> values, double percentile) {
    check_percentile(percentile, "empirical");
    auto copy = sorted_finite(values);
    return select_descending(copy, descending_rank(percentile, copy.size()));
}

std::vector<double> bootstrap_estimates(std::span<const double> values, const BootstrapConfig& config) {
    config.validate();
    Resampler resampler(sorted_finite(values), config);
    std::vector<double> estimates(config.resamples);
    if (resampler.constant()) {
        std::fill(estimates.begin(), estimates.end(), resampler.low());
        return estimates;
    }
    for (auto& e : estimates) e = resampler.next();
    return estimates;
}

double bootstrap_percentile(std::span<const double> values, const BootstrapConfig& config) {
    auto estimates = bootstrap_estimates(values, config);
    return select_descending(estimates, descending_rank(config.percentile, estimates.size()));
}

bool bootstrap_bound_meets(std::span<const double> values, const BootstrapConfig& config, double threshold,
                           BoundCheck check) {
    config.validate();
    Resampler resampler(sorted_finite(values), config);
    // Every estimate lies in [low, high], so the data range alone may decide.
    if (check == BoundCheck::at_least) {
        if (resampler.low() >= threshold) return true;
        if (resampler.high() < threshold) return false;
    } else {
        if (resampler.high() <= threshold) return true;
        if (resampler.low() > threshold) return false;
    }

    const std::size_t b = config.resamples;
    const std::size_t rank = descending_rank(config.percentile, b);
    // at_least: the rank-th largest is >= t  <=>  at least `rank` estimates are >= t.
    // at_most:  the rank-th largest is <= t  <=>  fewer than `rank` estimates are > t.
    std::size_t hits = 0;
    for (std::size_t k = 1; k <= b; ++k) {
        const double e = resampler.next();
        const std::size_t remaining = b - k;
        if (check == BoundCheck::at_least) {
            if (e >= threshold) ++hits;
            if (hits >= rank) return true;
            if (hits + remaining < rank) return false;
        } else {
            if (e > threshold) ++hits;
            if (hits >= rank) return false;
            if (hits + remaining < rank) return true;
        }
    }
    // Unreachable: the loop settles by k == b.
    return check == BoundCheck::at_least ? hits >= rank : hits < rank;
}

ThresholdSet generate_thresholds(const MetricTable& table, const ThresholdOptions& options) {
    check_percentile(options.dice_percentile, "dice threshold");
    check_percentile(options.hd_percentile, "hd threshold");
    if (options.resamples < 1) throw Error("bootstrap: resample count must be at least 1");
    table.validate();

    ThresholdSet out;
    out.organs = table.organs();
    out.dice_percentile = options.dice_percentile;
    out.hd_percentile = options.hd_percentile;
    out.seed = options.seed;
    out.resamples = options.resamples;
    out.statistic = options.statistic;
    out.bootstrapped = options.use_bootstrap;
    out.source = options.source;

    auto estimate = [&](const std::vector<double>& column, std::size_t organ, std::uint64_t indicator,
                        double percentile) {
        if (!options.use_bootstrap) return empirical_percentile(column, percentile);
        BootstrapConfig config;
        config.resamples = options.resamples;
        config.statistic = options.statistic;
        config.percentile = percentile;
        config.seed = derive_seed(options.seed, {seed_tag::threshold, organ, indicator});
        return bootstrap_percentile(column, config);
    };

    for (std::size_t j = 0; j < table.organ_count(); ++j) {
        out.dice.push_back(estimate(table.dice_column(j), j, seed_tag::dice, options.dice_percentile));

        std::vector<double> finite;
        for (double h : table.hd_column(j))
            if (std::isfinite(h)) finite.push_back(h);
        if (finite.empty()) {
            if (!options.allow_infinite_hd_columns)
                throw Error("organ '" + table.organs()[j] +
                            "': every Hausdorff distance is infinite, no HD threshold can be derived");
            out.hd.push_back(std::numeric_limits<double>::infinity());
        } else {
            out.hd.push_back(estimate(finite, j, seed_tag::hd, options.hd_percentile));
        }
    }
    return out;
}

}  // namespace mimo
