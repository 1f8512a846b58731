#include <gtest/gtest.h>

#include <json.hpp>

#include "mimo/error.hpp"
#include "mimo/serialize.hpp"
#include "mimo/synthgen.hpp"

using namespace mimo;

TEST(Serialize, ThresholdRoundTrip) {
    ThresholdSet t;
    t.organs = {"liver", "aorta"};
    t.dice = {0.8125, 0.1};
    t.hd = {3.5, std::numeric_limits<double>::infinity()};
    t.seed = 99;
    t.resamples = 250;
    t.statistic = Statistic::median;
    t.dice_percentile = 30;
    t.hd_percentile = 70;
    t.source = "metrics.csv";
    const auto text = thresholds_to_json(t);
    const auto back = thresholds_from_json(text);
    EXPECT_EQ(back.organs, t.organs);
    EXPECT_EQ(back.dice, t.dice);
    EXPECT_EQ(back.hd, t.hd);
    EXPECT_EQ(back.seed, 99u);
    EXPECT_EQ(back.resamples, 250u);
    EXPECT_EQ(back.statistic, Statistic::median);
    EXPECT_EQ(back.source, t.source);
    EXPECT_EQ(thresholds_to_json(back), text);
}

TEST(Serialize, ThresholdRejections) {
    EXPECT_THROW(thresholds_from_json("[]"), Error);
    EXPECT_THROW(thresholds_from_json(R"({"organs": {}})"), Error);
    EXPECT_THROW(thresholds_from_json(R"({"organs": {"a": {"dice": 0.5}}})"), Error);
    EXPECT_THROW(thresholds_from_json(R"({"organs": {"a": {"dice": "x", "hd": 1}}})"), Error);
}

TEST(Serialize, ReportShapes) {
    const std::size_t counts[] = {2, 1};
    const auto table = planted_table(3, counts, 7);
    ThresholdOptions opts;
    opts.allow_infinite_hd_columns = true;
    const auto report = mimo_score(table, generate_thresholds(table, opts));
    const auto doc = nlohmann::json::parse(report_to_json(report, table));
    EXPECT_EQ(doc["qualified_count"], 3);
    EXPECT_EQ(doc["total"], 6);
    ASSERT_EQ(doc["organs"].size(), 2u);
    EXPECT_EQ(doc["organs"][0]["qualified"], 2);
    EXPECT_EQ(doc["organs"][0]["samples"].size(), 3u);
    EXPECT_EQ(doc["organs"][0]["samples"][2]["hd"], "inf");
    EXPECT_FALSE(doc["organs"][0]["samples"][2]["passed"].get<bool>());

    const auto csv = report_to_csv(report, table);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "organ,sample_id,conf,dice,hd,passed");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 7);
}
