#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"
#include "mimo/metric_table.hpp"
#include "mimo/synthgen.hpp"
#include "oracles.hpp"

using namespace mimo;
using oracle::TempDir;

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string str(const std::filesystem::path& p) { return p.string(); }

void write_table(const std::filesystem::path& p, const MetricTable& t) { write_metric_csv(p, t); }

MetricTable planted(std::size_t n, std::vector<std::size_t> counts) { return planted_table(n, counts, 3); }

}  // namespace

TEST(Cli, ComputeMetricsOnPerfectDataset) {
    TempDir dir("cli");
    ASSERT_EQ(run({"synth", "-o", str(dir / "data"), "--samples", "3", "--organs", "2", "--seed", "1"}).code, 0);
    auto r = run({"compute-metrics", "-m", str(dir / "data" / "manifest.json"), "-o", str(dir / "m.csv")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto table = read_metric_csv(dir / "m.csv");
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 2; ++j) {
            EXPECT_EQ(table.dice(i, j), 1.0);
            EXPECT_EQ(table.hd(i, j), 0.0);
        }
    EXPECT_NE(r.out.find("organ01,1.000000,0.000000,0"), std::string::npos) << r.out;

    ASSERT_EQ(run({"compute-metrics", "-m", str(dir / "data" / "manifest.json"), "-o", str(dir / "m2.csv"),
                   "--threads", "3"})
                  .code,
              0);
    EXPECT_EQ(slurp(dir / "m.csv"), slurp(dir / "m2.csv"));
}

TEST(Cli, ComputeMetricsRequiresProbabilities) {
    TempDir dir("cli");
    ASSERT_EQ(run({"synth", "-o", str(dir / "data"), "--samples", "2", "--organs", "1", "--seed", "1"}).code, 0);
    auto manifest = nlohmann::json::parse(slurp(dir / "data" / "manifest.json"));
    manifest["samples"][0].erase("prob");
    std::ofstream(dir / "data" / "manifest.json") << manifest.dump();
    auto r = run({"compute-metrics", "-m", str(dir / "data" / "manifest.json"), "-o", str(dir / "m.csv")});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("case000"), std::string::npos) << r.err;
    EXPECT_NE(r.err.find("prob"), std::string::npos) << r.err;
    EXPECT_FALSE(std::filesystem::exists(dir / "m.csv"));
}

TEST(Cli, ThresholdsOnConstantTable) {
    TempDir dir("cli");
    MetricTable t({"a", "b", "c"}, {"x", "y"});
    for (std::size_t i = 0; i < 3; ++i) {
        t.dice(i, 0) = 0.75;
        t.hd(i, 0) = 4.5;
        t.conf(i, 0) = 0.5;
        t.dice(i, 1) = 0.25;
        t.hd(i, 1) = 1.0;
        t.conf(i, 1) = 0.5;
    }
    write_table(dir / "t.csv", t);
    auto r = run({"thresholds", "--metrics", str(dir / "t.csv"), "-o", str(dir / "th.json"), "--seed", "5",
                  "--sweep", str(dir / "sweep.csv")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto doc = nlohmann::json::parse(slurp(dir / "th.json"));
    EXPECT_EQ(doc["organs"]["x"]["dice"], 0.75);
    EXPECT_EQ(doc["organs"]["x"]["hd"], 4.5);
    EXPECT_EQ(doc["organs"]["y"]["dice"], 0.25);
    EXPECT_EQ(doc["seed"], 5);
    const auto sweep = slurp(dir / "sweep.csv");
    EXPECT_EQ(std::count(sweep.begin(), sweep.end(), '\n'), 1 + 19 * 2);

    const std::string first = slurp(dir / "th.json");
    ASSERT_EQ(run({"thresholds", "--metrics", str(dir / "t.csv"), "-o", str(dir / "th.json"), "--seed", "5"}).code, 0);
    EXPECT_EQ(slurp(dir / "th.json"), first);
}

TEST(Cli, ThresholdsRejectAllInfiniteHd) {
    TempDir dir("cli");
    write_table(dir / "t.csv", planted(4, {0}));
    auto r = run({"thresholds", "--metrics", str(dir / "t.csv"), "-o", str(dir / "th.json"), "--seed", "1"});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("infinite"), std::string::npos);
}

TEST(Cli, ScorePerfectAndPlanted) {
    TempDir dir("cli");
    write_table(dir / "perfect.csv", planted(5, {5, 5}));
    auto r = run({"score", "--metrics", str(dir / "perfect.csv"), "--seed", "2", "-o", str(dir / "r.json"),
                  "--pass-fail", str(dir / "pf.csv")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, "score 1.000000 (10/10)\n");
    EXPECT_EQ(nlohmann::json::parse(slurp(dir / "r.json"))["score"], 1.0);

    write_table(dir / "btcv.csv", planted(6, {1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 0, 0, 0}));
    r = run({"score", "--metrics", str(dir / "btcv.csv"), "--seed", "2"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, "score 0.128205 (10/78)\n");

    r = run({"score", "--metrics", str(dir / "btcv.csv"), "--seed", "2", "--format", "md", "-o", str(dir / "r.md")});
    ASSERT_EQ(r.code, 0);
    EXPECT_NE(slurp(dir / "r.md").find("| organ01 |"), std::string::npos);
}

TEST(Cli, ScoreWithExternalThresholdsChecksOrgans) {
    TempDir dir("cli");
    write_table(dir / "a.csv", planted(4, {2, 2}));
    std::ofstream(dir / "th.json") << R"({"organs": {"organ01": {"dice": 0.5, "hd": 1}, "liver": {"dice": 0.5, "hd": 1}}})";
    auto r = run({"score", "--metrics", str(dir / "a.csv"), "--thresholds", str(dir / "th.json"), "--seed", "1"});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("organ02"), std::string::npos) << r.err;

    std::ofstream(dir / "ok.json") << R"({"organs": {"organ01": {"dice": 0.5, "hd": 1}, "organ02": {"dice": 0.5, "hd": 1}}})";
    r = run({"score", "--metrics", str(dir / "a.csv"), "--thresholds", str(dir / "ok.json"), "--seed", "1"});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, "score 0.500000 (4/8)\n");
}

TEST(Cli, ScoreSweepSurface) {
    TempDir dir("cli");
    const ColumnDistribution col{};
    write_table(dir / "t.csv", generate_metric_table(20, 2, std::span(&col, 1), 4));
    auto r = run({"score", "--metrics", str(dir / "t.csv"), "--seed", "3", "-b", "200", "--sweep",
                  str(dir / "surface.csv"), "--grid", "10,50,90"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto text = slurp(dir / "surface.csv");
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 10);
    EXPECT_EQ(text.substr(0, text.find('\n')), "dice_percentile,hd_percentile,score,qualified_count,total");
}

TEST(Cli, CompareOrdersModelsAndBreaksTiesByName) {
    TempDir dir("cli");
    write_table(dir / "good.csv", planted(4, {4, 4}));
    write_table(dir / "bad.csv", planted(4, {0, 1}));
    write_table(dir / "also_good.csv", planted(4, {4, 4}));
    auto r = run({"compare", "--metrics", str(dir / "bad.csv"), "--metrics", str(dir / "good.csv"), "--metrics",
                  str(dir / "also_good.csv"), "--seed", "1", "--format", "csv"});
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream lines(r.out);
    std::string header, first, second, third;
    std::getline(lines, header);
    std::getline(lines, first);
    std::getline(lines, second);
    std::getline(lines, third);
    EXPECT_EQ(first.substr(0, 12), "1,also_good,");
    EXPECT_EQ(second.substr(0, 7), "2,good,");
    EXPECT_EQ(third.substr(0, 6), "3,bad,");

    r = run({"compare", "--metrics", str(dir / "good.csv"), "--seed", "1", "--format", "md"});
    ASSERT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("| 1 | good |"), std::string::npos);

    write_table(dir / "other.csv", planted(4, {4}));
    r = run({"compare", "--metrics", str(dir / "good.csv"), "--metrics", str(dir / "other.csv"), "--seed", "1"});
    EXPECT_EQ(r.code, 1);
}

TEST(Cli, RobustnessWithAndWithoutBootstrap) {
    TempDir dir("cli");
    write_table(dir / "good.csv", planted(8, {8, 8}));
    write_table(dir / "bad.csv", planted(8, {0, 0}));
    for (bool ablate : {false, true}) {
        std::vector<std::string> args{"robustness", "--metrics", str(dir / "good.csv"), "--metrics", str(dir / "bad.csv"),
                                      "-o", str(dir / "rob.json"), "--csv", str(dir / "rob.csv"), "--trials-inner", "4",
                                      "--trials-outer", "3", "--seed", "9", "-b", "100"};
        if (ablate) args.push_back("--no-bootstrap");
        auto r = run(args);
        ASSERT_EQ(r.code, 0) << r.err;
        const auto doc = nlohmann::json::parse(slurp(dir / "rob.json"));
        EXPECT_EQ(doc["config"]["bootstrap"], !ablate);
        EXPECT_EQ(doc["models"][0]["mean_percent"], 0.0);
        EXPECT_EQ(doc["models"][1]["std_percent"], 0.0);
        EXPECT_EQ(slurp(dir / "rob.csv"), "model,mean_percent,std_percent\ngood,0,0\nbad,0,0\n");
    }
    write_table(dir / "tiny.csv", planted(1, {1}));
    write_table(dir / "tiny2.csv", planted(1, {0}));
    auto r = run({"robustness", "--metrics", str(dir / "tiny.csv"), "--metrics", str(dir / "tiny2.csv"), "-o",
                  str(dir / "x.json"), "--seed", "1"});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("at least 2 samples"), std::string::npos) << r.err;
}

TEST(Cli, UreAndCalibration) {
    TempDir dir("cli");
    write_table(dir / "t.csv", planted(4, {3}));
    auto r = run({"ure", "--metrics", str(dir / "t.csv"), "--organ", "organ01", "--requirement", "0.9", "--seed", "1"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, "ure 0.750000\n");
    r = run({"calibration", "--metrics", str(dir / "t.csv"), "-o", str(dir / "cal.json")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(std::filesystem::exists(dir / "cal.json"));
}

TEST(Cli, SeedIsReportedWhenOmitted) {
    TempDir dir("cli");
    write_table(dir / "t.csv", planted(4, {2}));
    auto r = run({"score", "--metrics", str(dir / "t.csv"), "-o", str(dir / "r.json")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.err.find("seed: "), std::string::npos);
    const auto seed = nlohmann::json::parse(slurp(dir / "r.json"))["config"]["seed"].get<std::uint64_t>();
    EXPECT_NE(r.err.find(std::to_string(seed)), std::string::npos);
}

TEST(Cli, UsageErrors) {
    EXPECT_NE(run({}).code, 0);
    EXPECT_NE(run({"score"}).code, 0);
    EXPECT_NE(run({"score", "--metrics", "x.csv", "--dice-percentile", "150"}).code, 0);
    EXPECT_EQ(run({"frobnicate"}).code, 2);
    auto r = run({"score", "--metrics", "/nonexistent/x.csv", "--seed", "1"});
    EXPECT_EQ(r.code, 1);
    EXPECT_EQ(r.err.rfind("error: ", 0), 0u);
}

TEST(CliProcess, ExitCodes) {
    const std::string exe = MIMO_CLI_PATH;
    EXPECT_EQ(std::system((exe + " --help > /dev/null").c_str()), 0);
    EXPECT_NE(std::system((exe + " score --metrics /nonexistent.csv --seed 1 2> /dev/null").c_str()), 0);
}
