#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "mimo/bootstrap.hpp"
#include "mimo/metrics.hpp"
#include "mimo/robustness.hpp"
#include "mimo/screening.hpp"
#include "mimo/synthgen.hpp"

using namespace mimo;

namespace {

OrganMask ball(std::size_t side, double radius, double offset) {
    OrganMask mask;
    mask.shape = {side, side, side};
    mask.voxels.assign(side * side * side, 0);
    const double c = static_cast<double>(side) / 2.0 + offset;
    for (std::size_t i = 0; i < side; ++i)
        for (std::size_t j = 0; j < side; ++j)
            for (std::size_t k = 0; k < side; ++k) {
                const double x = static_cast<double>(i) - c, y = static_cast<double>(j) - c, z = static_cast<double>(k) - c;
                mask.voxels[(i * side + j) * side + k] = x * x + y * y + z * z <= radius * radius;
            }
    return mask;
}

double brute_force_squared(const SurfacePointSet& a, const SurfacePointSet& b) {
    auto directed = [](const SurfacePointSet& from, const SurfacePointSet& to) {
        double worst = 0.0;
        for (const auto& p : from.points) {
            double best = INFINITY;
            for (const auto& q : to.points) {
                const double dx = p[0] - q[0], dy = p[1] - q[1], dz = p[2] - q[2];
                best = std::min(best, dx * dx + dy * dy + dz * dz);
            }
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::max(directed(a, b), directed(b, a));
}

void BM_HausdorffKdTree(benchmark::State& state) {
    const auto side = static_cast<std::size_t>(state.range(0));
    const auto g = extract_surface(ball(side, side * 0.35, 0.0));
    const auto v = extract_surface(ball(side, side * 0.3, 1.5));
    for (auto _ : state) benchmark::DoNotOptimize(hausdorff_squared(g, v));
    state.counters["points"] = static_cast<double>(g.size() + v.size());
}
BENCHMARK(BM_HausdorffKdTree)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_HausdorffBruteForce(benchmark::State& state) {
    const auto side = static_cast<std::size_t>(state.range(0));
    const auto g = extract_surface(ball(side, side * 0.35, 0.0));
    const auto v = extract_surface(ball(side, side * 0.3, 1.5));
    for (auto _ : state) benchmark::DoNotOptimize(brute_force_squared(g, v));
    state.counters["points"] = static_cast<double>(g.size() + v.size());
}
BENCHMARK(BM_HausdorffBruteForce)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_ExtractSurface(benchmark::State& state) {
    const auto mask = ball(static_cast<std::size_t>(state.range(0)), state.range(0) * 0.35, 0.0);
    for (auto _ : state) benchmark::DoNotOptimize(extract_surface(mask));
}
BENCHMARK(BM_ExtractSurface)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

MetricTable noisy_table(std::size_t n, std::size_t m, double dice_mean = 0.75, std::uint64_t seed = 7) {
    const ColumnDistribution col{dice_mean, 0.15, 6.0, 3.0, 0.0, 0.1, 0.03};
    return generate_metric_table(n, m, std::span(&col, 1), seed);
}

void BM_BootstrapPercentile(benchmark::State& state) {
    const auto table = noisy_table(static_cast<std::size_t>(state.range(0)), 1);
    const auto column = table.dice_column(0);
    BootstrapConfig config;
    config.resamples = 1000;
    config.seed = 3;
    for (auto _ : state) benchmark::DoNotOptimize(bootstrap_percentile(column, config));
}
BENCHMARK(BM_BootstrapPercentile)->Arg(30)->Arg(60)->Arg(500)->Unit(benchmark::kMicrosecond);

void BM_ScreenOrgan(benchmark::State& state) {
    const auto table = noisy_table(static_cast<std::size_t>(state.range(0)), 1);
    const auto dice = table.dice_column(0), hd = table.hd_column(0), conf = table.conf_column(0);
    const OrganColumns columns{dice, hd, conf, table.sample_ids()};
    ScreeningOptions options;
    options.record_bounds = state.range(1) != 0;
    for (auto _ : state) benchmark::DoNotOptimize(screen_organ(columns, 0.75, 6.0, 0, options));
}
BENCHMARK(BM_ScreenOrgan)->Args({60, 0})->Args({60, 1})->Unit(benchmark::kMillisecond);

void BM_MimoScore(benchmark::State& state) {
    const auto table = noisy_table(60, 15);
    ThresholdOptions t;
    t.allow_infinite_hd_columns = true;
    const auto thresholds = generate_thresholds(table, t);
    ScreeningOptions options;
    options.record_bounds = false;
    for (auto _ : state) benchmark::DoNotOptimize(mimo_score(table, thresholds, options).score);
}
BENCHMARK(BM_MimoScore)->Unit(benchmark::kMillisecond);

void BM_RobustnessTrials(benchmark::State& state) {
    const std::vector<NamedTable> models{{"a", noisy_table(60, 15)}, {"b", noisy_table(60, 15, 0.7, 8)}};
    RobustnessConfig config;
    config.trials_outer = 1;
    config.trials_inner = 10;
    config.threads = 1;
    for (auto _ : state) benchmark::DoNotOptimize(robustness_experiment(models, config).mean_percent);
}
BENCHMARK(BM_RobustnessTrials)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
