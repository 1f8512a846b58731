#include <gtest/gtest.h>

#include <random>

#include "mimo/calibration.hpp"
#include "mimo/error.hpp"

using namespace mimo;

TEST(Calibration, HandCase) {
    const std::vector<double> s{0.8, 0.6}, c{0.9, 0.5};
    // Gaps are 0.1 up to the binary representation of the inputs.
    EXPECT_NEAR(ece(s, c), 0.1, 1e-15);
    EXPECT_NEAR(mce(s, c), 0.1, 1e-15);
    const std::vector<double> s2{1.0, 0.5, 0.25}, c2{0.5, 0.5, 0.0};
    EXPECT_EQ(ece(s2, c2), 0.25);
    EXPECT_EQ(mce(s2, c2), 0.5);
}

TEST(Calibration, PerfectCalibrationIsZero) {
    const std::vector<double> v{0.1, 0.7, 0.3, 1.0};
    EXPECT_EQ(ece(v, v), 0.0);
    EXPECT_EQ(mce(v, v), 0.0);
}

TEST(Calibration, Rejections) {
    const std::vector<double> a{0.5}, b{0.5, 0.5}, empty, nan{std::nan("")};
    EXPECT_THROW(ece(a, b), Error);
    EXPECT_THROW(mce(empty, empty), Error);
    EXPECT_THROW(ece(nan, a), Error);
}

TEST(CalibrationProperty, EceBoundedByMce) {
    std::mt19937_64 gen(17);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<double> s(1 + gen() % 30), c(s.size());
        for (auto& x : s) x = unit(gen);
        for (auto& x : c) x = unit(gen);
        const double e = ece(s, c), m = mce(s, c);
        EXPECT_LE(0.0, e);
        EXPECT_LE(e, m);
        EXPECT_LE(m, 1.0);
    }
}

TEST(Calibration, ReportLevels) {
    MetricTable t({"a", "b"}, {"x", "y"});
    t.dice(0, 0) = 1.0;
    t.conf(0, 0) = 0.5;
    t.dice(0, 1) = 0.5;
    t.conf(0, 1) = 1.0;
    t.dice(1, 0) = 0.25;
    t.conf(1, 0) = 0.25;
    t.dice(1, 1) = 0.75;
    t.conf(1, 1) = 0.25;
    // Row means: a (0.75, 0.75), b (0.5, 0.25)
    auto r = calibration_report(t);
    EXPECT_EQ(r.per_sample_gaps, (std::vector<double>{0.0, 0.25}));
    EXPECT_EQ(r.ece, 0.125);
    EXPECT_EQ(r.mce, 0.25);
    auto cell = calibration_report(t, CalibrationLevel::per_sample_organ);
    EXPECT_EQ(cell.per_sample_gaps, (std::vector<double>{0.5, 0.5, 0.0, 0.5}));
    EXPECT_EQ(cell.ece, 0.375);
    EXPECT_EQ(cell.mce, 0.5);
}
