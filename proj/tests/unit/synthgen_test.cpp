#include <gtest/gtest.h>

#include <cmath>

#include "mimo/calibration.hpp"
#include "mimo/error.hpp"
#include "mimo/manifest.hpp"
#include "mimo/metrics.hpp"
#include "mimo/synthgen.hpp"
#include "oracles.hpp"

using namespace mimo;

namespace {

SynthSpec spec_with(OrganProfile profile, std::size_t samples = 4, std::size_t organs = 2) {
    SynthSpec s;
    s.samples = samples;
    s.organs = organs;
    s.shape = {32, 32, 32};
    s.profiles = {profile};
    s.seed = 21;
    return s;
}

MetricTable build(const SynthSpec& spec) {
    oracle::TempDir dir("synth");
    return build_metric_table(generate_dataset(spec, dir.path()));
}

}  // namespace

TEST(Synthgen, ZeroRadiusIsPerfect) {
    const auto t = build(spec_with(OrganProfile{}));
    for (std::size_t i = 0; i < t.sample_count(); ++i)
        for (std::size_t j = 0; j < t.organ_count(); ++j) {
            EXPECT_EQ(t.dice(i, j), 1.0);
            EXPECT_EQ(t.hd(i, j), 0.0);
            EXPECT_NEAR(t.conf(i, j), 1.0, 1e-7);
        }
}

TEST(Synthgen, BoxPerturbationHausdorffIsCornerOffset) {
    for (unsigned r : {1u, 2u, 3u})
        for (auto morph : {Morphology::dilate, Morphology::erode}) {
            const auto t = build(spec_with(OrganProfile{r, false, morph, ConfidenceModel::calibrated, 0.0}, 3));
            for (std::size_t i = 0; i < t.sample_count(); ++i)
                for (std::size_t j = 0; j < t.organ_count(); ++j) {
                    EXPECT_EQ(t.hd(i, j), std::sqrt(3.0 * r * r));
                    EXPECT_LT(t.dice(i, j), 1.0);
                }
        }
}

TEST(Synthgen, MeanDiceFallsWithRadius) {
    double previous = 1.1;
    for (unsigned r : {0u, 1u, 2u, 3u}) {
        const auto t = build(spec_with(OrganProfile{r, false, Morphology::dilate, ConfidenceModel::calibrated, 0.0}, 6));
        double sum = 0.0;
        for (std::size_t i = 0; i < t.sample_count(); ++i)
            for (std::size_t j = 0; j < t.organ_count(); ++j) sum += t.dice(i, j);
        const double mean = sum / static_cast<double>(t.sample_count() * t.organ_count());
        EXPECT_LT(mean, previous);
        previous = mean;
    }
}

TEST(Synthgen, CalibratedConfidenceTracksDice) {
    const auto t = build(spec_with(OrganProfile{2, true, Morphology::alternate, ConfidenceModel::calibrated, 0.0}, 6));
    for (std::size_t i = 0; i < t.sample_count(); ++i)
        for (std::size_t j = 0; j < t.organ_count(); ++j)
            EXPECT_NEAR(t.conf(i, j), std::max(t.dice(i, j), 1.0 / 3.0 + 0.01), 1e-6);  // argmax floor for 3 classes
}

TEST(Synthgen, OverconfidentOffsetShowsInEce) {
    const auto t = build(spec_with(OrganProfile{1, false, Morphology::dilate, ConfidenceModel::overconfident, 0.2}, 6));
    const auto report = calibration_report(t);
    EXPECT_NEAR(report.ece, 0.2, 0.05);
    for (std::size_t i = 0; i < t.sample_count(); ++i)
        for (std::size_t j = 0; j < t.organ_count(); ++j) EXPECT_GE(t.conf(i, j), t.dice(i, j));
}

TEST(Synthgen, VolumesAreConsistent) {
    oracle::TempDir dir("synth");
    auto spec = spec_with(OrganProfile{2, true, Morphology::erode, ConfidenceModel::underconfident, 0.3}, 2, 5);
    spec.spacing = {2.0, 1.0, 0.5};
    const auto manifest = generate_dataset(spec, dir.path());
    EXPECT_EQ(manifest.organs.size(), 5u);
    for (const auto& s : manifest.samples) {
        EXPECT_EQ(s.spacing, spec.spacing);
        const auto gt = load_label_volume(s.ground_truth, s.spacing, 5u);
        const auto pred = load_label_volume(s.prediction, s.spacing, 5u);
        const auto prob = load_probability_volume(*s.probabilities, 6);  // validates sums and range
        EXPECT_NO_THROW(check_argmax_consistency(prob, pred));
        for (unsigned organ = 1; organ <= 5; ++organ)
            EXPECT_GT(extract_organ_mask(gt, organ, 5).count(), 0u);
    }
    const auto reloaded = load_manifest(dir / "manifest.json");
    EXPECT_EQ(reloaded.sample_count(), 2u);
}

TEST(Synthgen, SeedDeterminesOutput) {
    const auto spec = spec_with(OrganProfile{3, true, Morphology::alternate, ConfidenceModel::calibrated, 0.0});
    const auto a = build(spec), b = build(spec);
    auto other = spec;
    other.seed += 1;
    const auto c = build(other);
    bool differs = false;
    for (std::size_t i = 0; i < a.sample_count(); ++i)
        for (std::size_t j = 0; j < a.organ_count(); ++j) {
            EXPECT_EQ(a.dice(i, j), b.dice(i, j));
            EXPECT_EQ(a.conf(i, j), b.conf(i, j));
            differs = differs || a.dice(i, j) != c.dice(i, j);
        }
    EXPECT_TRUE(differs);
}

TEST(Synthgen, Rejections) {
    oracle::TempDir dir("synth");
    auto spec = spec_with(OrganProfile{6, false, Morphology::dilate, ConfidenceModel::calibrated, 0.0}, 1, 8);
    EXPECT_THROW(generate_dataset(spec, dir.path()), Error);
    spec = spec_with(OrganProfile{});
    spec.profiles.clear();
    EXPECT_THROW(generate_dataset(spec, dir.path()), Error);
    spec = spec_with(OrganProfile{});
    spec.samples = 0;
    EXPECT_THROW(generate_dataset(spec, dir.path()), Error);
    EXPECT_THROW(parse_confidence_model("smug"), Error);
    EXPECT_THROW(parse_morphology("twist"), Error);
}

TEST(SynthTable, PlantedAndSampledTables) {
    const std::size_t counts[] = {0, 3, 6};
    const auto t = planted_table(6, counts, 4);
    for (std::size_t j = 0; j < 3; ++j) {
        std::size_t perfect = 0;
        for (std::size_t i = 0; i < 6; ++i) perfect += t.dice(i, j) == 1.0;
        EXPECT_EQ(perfect, counts[j]);
    }
    EXPECT_NO_THROW(t.validate());
    const std::size_t too_many[] = {7};
    EXPECT_THROW(planted_table(6, too_many, 1), Error);

    const ColumnDistribution col{0.7, 0.2, 4, 1, 0.1, 0.0, 0.5};
    const auto s = generate_metric_table(200, 2, std::span(&col, 1), 9);
    EXPECT_NO_THROW(s.validate());
    std::size_t missing = 0;
    for (std::size_t i = 0; i < 200; ++i) missing += std::isinf(s.hd(i, 0));
    EXPECT_GT(missing, 60u);
    EXPECT_LT(missing, 140u);
}
