#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <optional>
#include <random>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mimo/atomic_file.hpp"
#include "mimo/bootstrap.hpp"
#include "mimo/calibration.hpp"
#include "mimo/error.hpp"
#include "mimo/manifest.hpp"
#include "mimo/metric_table.hpp"
#include "mimo/metrics.hpp"
#include "mimo/robustness.hpp"
#include "mimo/screening.hpp"
#include "mimo/serialize.hpp"
#include "mimo/synthgen.hpp"

namespace mimo::cli {
namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

struct Common {
    double dice_percentile = 50.0;
    double hd_percentile = 50.0;
    double ci_dice = 95.0;
    double ci_hd = 5.0;
    std::size_t resamples = 1000;
    std::optional<std::uint64_t> seed;
    std::string statistic = "mean";
    bool no_bootstrap = false;
    unsigned threads = 0;
    std::string format = "json";
};

struct Context {
    std::ostream& out;
    std::ostream& err;
};

void add_threshold_flags(CLI::App* cmd, Common& c) {
    cmd->add_option("--dice-percentile", c.dice_percentile, "Dice threshold percentile (descending rank)")
        ->check(CLI::Range(0.0, 100.0))
        ->capture_default_str();
    cmd->add_option("--hd-percentile", c.hd_percentile, "HD threshold percentile (descending rank)")
        ->check(CLI::Range(0.0, 100.0))
        ->capture_default_str();
}

void add_ci_flags(CLI::App* cmd, Common& c) {
    cmd->add_option("--ci-dice", c.ci_dice, "Dice prefix bound percentile")->capture_default_str();
    cmd->add_option("--ci-hd", c.ci_hd, "HD prefix bound percentile")->capture_default_str();
}

void add_bootstrap_flags(CLI::App* cmd, Common& c) {
    cmd->add_option("-b,--bootstrap-samples", c.resamples, "Bootstrap resamples")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--seed", c.seed, "Master seed; a random seed is chosen and printed when omitted");
    cmd->add_option("--statistic", c.statistic, "Bootstrap statistic")
        ->check(CLI::IsMember({"mean", "median"}))
        ->capture_default_str();
    cmd->add_flag("--no-bootstrap", c.no_bootstrap, "Use empirical percentiles instead of bootstrapping");
}

void add_threads_flag(CLI::App* cmd, Common& c) {
    cmd->add_option("--threads", c.threads, "Worker threads (0 = all cores)")->capture_default_str();
}

void add_format_flag(CLI::App* cmd, Common& c, std::vector<std::string> choices) {
    cmd->add_option("--format", c.format, "Output format")->check(CLI::IsMember(choices))->capture_default_str();
}

std::uint64_t resolve_seed(const Common& c, Context& ctx) {
    if (c.seed) return *c.seed;
    std::random_device device;
    const std::uint64_t seed = (std::uint64_t{device()} << 32) ^ device();
    ctx.err << "seed: " << seed << " (generated; pass --seed " << seed << " to reproduce)\n";
    return seed;
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_output(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    write_file_atomic(path, text);
}

std::string fixed(double value, int digits = 6) {
    if (!std::isfinite(value)) return format_number(value);
    std::ostringstream s;
    s << std::fixed << std::setprecision(digits) << value;
    return s.str();
}

ThresholdOptions threshold_options(const Common& c, std::uint64_t seed, bool lenient, const std::string& source) {
    ThresholdOptions t;
    t.dice_percentile = c.dice_percentile;
    t.hd_percentile = c.hd_percentile;
    t.resamples = c.resamples;
    t.statistic = parse_statistic(c.statistic);
    t.seed = seed;
    t.use_bootstrap = !c.no_bootstrap;
    t.allow_infinite_hd_columns = lenient;
    t.source = source;
    return t;
}

ScreeningOptions screening_options(const Common& c, std::uint64_t seed, bool record_bounds) {
    ScreeningOptions s;
    s.ci = {c.ci_dice, c.ci_hd};
    s.resamples = c.resamples;
    s.statistic = parse_statistic(c.statistic);
    s.seed = seed;
    s.use_bootstrap = !c.no_bootstrap;
    s.record_bounds = record_bounds;
    return s;
}

std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> grid;
    std::stringstream stream(text);
    std::string item;
    while (std::getline(stream, item, ',')) {
        double value = 0.0;
        try {
            std::size_t used = 0;
            value = std::stod(item, &used);
            if (used != item.size()) throw Error("");
        } catch (...) {
            throw Error("bad percentile '" + item + "' in grid");
        }
        if (!(value > 0.0 && value < 100.0)) throw Error("grid percentile " + item + " outside (0, 100)");
        grid.push_back(value);
    }
    if (grid.empty()) throw Error("empty percentile grid");
    return grid;
}

std::string default_grid() {
    std::string text;
    for (int p = 5; p <= 95; p += 10) text += (text.empty() ? "" : ",") + std::to_string(p);
    return text;
}

std::string model_name(const fs::path& path) { return path.stem().string(); }

double mean_of(const std::vector<double>& v) {
    double sum = 0.0;
    for (double x : v) sum += x;
    return v.empty() ? 0.0 : sum / static_cast<double>(v.size());
}

// ---- compute-metrics ------------------------------------------------------

struct ComputeArgs {
    fs::path manifest;
    fs::path output;
    std::string conf_mode = "predicted-voxels";
    std::optional<fs::path> calibration;
};

void compute_metrics(const ComputeArgs& a, const Common& c, Context& ctx) {
    TableBuildOptions options;
    options.confidence_mode = parse_confidence_mode(a.conf_mode);
    options.threads = c.threads;
    const auto table = build_metric_table(load_manifest(a.manifest), options);
    write_metric_csv(a.output, table);
    if (a.calibration) write_output(*a.calibration, calibration_to_json(calibration_report(table)));

    ctx.out << "samples " << table.sample_count() << ", organs " << table.organ_count() << "\n";
    ctx.out << "organ,mean_dice,mean_hd,infinite_hd\n";
    for (std::size_t j = 0; j < table.organ_count(); ++j) {
        std::vector<double> finite;
        for (double h : table.hd_column(j))
            if (std::isfinite(h)) finite.push_back(h);
        const double mean_hd = finite.empty() ? std::numeric_limits<double>::infinity() : mean_of(finite);
        ctx.out << table.organs()[j] << ',' << fixed(mean_of(table.dice_column(j))) << ',' << fixed(mean_hd) << ','
                << table.sample_count() - finite.size() << "\n";
    }
}

// ---- thresholds -----------------------------------------------------------

struct ThresholdArgs {
    fs::path metrics;
    fs::path output;
    std::optional<fs::path> sweep;
    std::string grid;
};

void thresholds(const ThresholdArgs& a, const Common& c, Context& ctx) {
    const auto table = read_metric_csv(a.metrics);
    const std::uint64_t seed = resolve_seed(c, ctx);
    const auto set = generate_thresholds(table, threshold_options(c, seed, false, a.metrics.filename().string()));
    write_output(a.output, thresholds_to_json(set));

    if (a.sweep) {
        std::ostringstream csv;
        csv << "percentile,organ,dice,hd\n";
        for (double p : parse_grid(a.grid.empty() ? "5,10,15,20,25,30,35,40,45,50,55,60,65,70,75,80,85,90,95" : a.grid)) {
            auto pc = c;
            pc.dice_percentile = pc.hd_percentile = p;
            const auto s = generate_thresholds(table, threshold_options(pc, seed, false, ""));
            for (std::size_t j = 0; j < s.organ_count(); ++j)
                csv << format_number(p) << ',' << s.organs[j] << ',' << format_number(s.dice[j]) << ','
                    << format_number(s.hd[j]) << '\n';
        }
        write_output(*a.sweep, csv.str());
    }
    for (std::size_t j = 0; j < set.organ_count(); ++j)
        ctx.out << set.organs[j] << ": dice >= " << fixed(set.dice[j]) << ", hd <= " << fixed(set.hd[j]) << "\n";
}

// ---- score ----------------------------------------------------------------

struct ScoreArgs {
    fs::path metrics;
    std::optional<fs::path> thresholds;
    std::optional<fs::path> output;
    std::optional<fs::path> pass_fail;
    std::optional<fs::path> sweep;
    std::string grid;
};

std::string score_markdown(const MimoReport& r) {
    std::ostringstream md;
    md << "# MIMO score\n\n";
    md << "score: " << fixed(r.score) << " (" << r.qualified_count << "/" << r.total << ")\n\n";
    md << "| organ | dice threshold | hd threshold | dice prefix | hd prefix | qualified | min confidence |\n";
    md << "|---|---|---|---|---|---|---|\n";
    for (const auto& o : r.organs) {
        const auto t = static_cast<std::size_t>(
            std::find(r.thresholds.organs.begin(), r.thresholds.organs.end(), o.organ) - r.thresholds.organs.begin());
        md << "| " << o.organ << " | " << fixed(r.thresholds.dice[t]) << " | " << fixed(r.thresholds.hd[t]) << " | "
           << o.dice_prefix << " | " << o.hd_prefix << " | " << o.qualified << " | "
           << (o.min_confidence ? fixed(*o.min_confidence) : std::string("-")) << " |\n";
    }
    return md.str();
}

void score(const ScoreArgs& a, const Common& c, Context& ctx) {
    const auto table = read_metric_csv(a.metrics);
    const std::uint64_t seed = resolve_seed(c, ctx);
    if (a.sweep && a.thresholds) throw Error("--sweep derives thresholds from the table; drop --thresholds");

    const auto set = a.thresholds
                         ? thresholds_from_json(read_text(*a.thresholds))
                         : generate_thresholds(table, threshold_options(c, seed, true, a.metrics.filename().string()));
    const auto report = mimo_score(table, set, screening_options(c, seed, true));

    if (a.output) {
        std::string text;
        if (c.format == "json") text = report_to_json(report, table);
        else if (c.format == "csv") text = report_to_csv(report, table);
        else text = score_markdown(report);
        write_output(*a.output, text);
    }
    if (a.pass_fail) write_output(*a.pass_fail, report_to_csv(report, table));

    if (a.sweep) {
        std::ostringstream csv;
        csv << "dice_percentile,hd_percentile,score,qualified_count,total\n";
        const auto grid = parse_grid(a.grid.empty() ? default_grid() : a.grid);
        for (double pd : grid)
            for (double ph : grid) {
                auto pc = c;
                pc.dice_percentile = pd;
                pc.hd_percentile = ph;
                const auto s = generate_thresholds(table, threshold_options(pc, seed, true, ""));
                const auto r = mimo_score(table, s, screening_options(c, seed, false));
                csv << format_number(pd) << ',' << format_number(ph) << ',' << format_number(r.score) << ','
                    << r.qualified_count << ',' << r.total << '\n';
            }
        write_output(*a.sweep, csv.str());
    }
    ctx.out << "score " << fixed(report.score) << " (" << report.qualified_count << "/" << report.total << ")\n";
}

// ---- compare --------------------------------------------------------------

struct CompareArgs {
    std::vector<fs::path> metrics;
    std::vector<std::string> names;
    std::optional<fs::path> thresholds;
    std::optional<fs::path> output;
};

struct Entry {
    std::string name;
    double score = 0.0;
    std::size_t qualified = 0, total = 0;
    double ece = 0.0, mce = 0.0, mean_dice = 0.0, mean_hd = 0.0;
    std::size_t infinite_hd = 0;
};

std::vector<std::string> model_names(const std::vector<fs::path>& paths, const std::vector<std::string>& names) {
    if (!names.empty() && names.size() != paths.size())
        throw Error("--name given " + std::to_string(names.size()) + " times for " + std::to_string(paths.size()) +
                    " metric tables");
    std::vector<std::string> out = names;
    if (out.empty())
        for (const auto& p : paths) out.push_back(model_name(p));
    std::set<std::string> unique(out.begin(), out.end());
    if (unique.size() != out.size()) throw Error("model names must be unique; use --name to set them");
    return out;
}

void compare(const CompareArgs& a, const Common& c, Context& ctx) {
    if (a.metrics.empty()) throw Error("compare needs at least one --metrics table");
    const auto names = model_names(a.metrics, a.names);
    const std::uint64_t seed = resolve_seed(c, ctx);
    std::optional<ThresholdSet> shared;
    if (a.thresholds) shared = thresholds_from_json(read_text(*a.thresholds));

    std::vector<Entry> entries;
    std::vector<std::string> organs;
    for (std::size_t k = 0; k < a.metrics.size(); ++k) {
        const auto table = read_metric_csv(a.metrics[k]);
        if (k == 0) organs = table.organs();
        if (table.organs() != organs)
            throw Error("model '" + names[k] + "' has a different organ set than '" + names[0] + "'");
        const auto set =
            shared ? *shared : generate_thresholds(table, threshold_options(c, seed, true, a.metrics[k].filename().string()));
        const auto report = mimo_score(table, set, screening_options(c, seed, false));
        const auto cal = calibration_report(table);
        Entry e;
        e.name = names[k];
        e.score = report.score;
        e.qualified = report.qualified_count;
        e.total = report.total;
        e.ece = cal.ece;
        e.mce = cal.mce;
        std::vector<double> dice, finite;
        for (std::size_t i = 0; i < table.sample_count(); ++i)
            for (std::size_t j = 0; j < table.organ_count(); ++j) {
                dice.push_back(table.dice(i, j));
                if (std::isfinite(table.hd(i, j))) finite.push_back(table.hd(i, j));
            }
        e.mean_dice = mean_of(dice);
        e.mean_hd = finite.empty() ? std::numeric_limits<double>::infinity() : mean_of(finite);
        e.infinite_hd = dice.size() - finite.size();
        entries.push_back(e);
    }
    // Higher score first; equal scores by ascending name.
    std::sort(entries.begin(), entries.end(), [](const Entry& x, const Entry& y) {
        if (x.score != y.score) return x.score > y.score;
        return x.name < y.name;
    });

    std::ostringstream text;
    if (c.format == "json") {
        json doc = json::array();
        for (std::size_t r = 0; r < entries.size(); ++r) {
            const auto& e = entries[r];
            doc.push_back({{"rank", r + 1},
                           {"model", e.name},
                           {"score", e.score},
                           {"qualified_count", e.qualified},
                           {"total", e.total},
                           {"ece", e.ece},
                           {"mce", e.mce},
                           {"mean_dice", e.mean_dice},
                           {"mean_hd", std::isfinite(e.mean_hd) ? json(e.mean_hd) : json("inf")},
                           {"infinite_hd", e.infinite_hd}});
        }
        text << doc.dump(2) << "\n";
    } else if (c.format == "csv") {
        text << "rank,model,score,qualified_count,total,ece,mce,mean_dice,mean_hd,infinite_hd\n";
        for (std::size_t r = 0; r < entries.size(); ++r) {
            const auto& e = entries[r];
            text << r + 1 << ',' << e.name << ',' << format_number(e.score) << ',' << e.qualified << ',' << e.total
                 << ',' << format_number(e.ece) << ',' << format_number(e.mce) << ',' << format_number(e.mean_dice)
                 << ',' << format_number(e.mean_hd) << ',' << e.infinite_hd << '\n';
        }
    } else {
        text << "| rank | model | score | ece | mce | mean dice | mean hd |\n|---|---|---|---|---|---|---|\n";
        for (std::size_t r = 0; r < entries.size(); ++r) {
            const auto& e = entries[r];
            text << "| " << r + 1 << " | " << e.name << " | " << fixed(e.score, 3) << " | " << fixed(e.ece, 3) << " | "
                 << fixed(e.mce, 3) << " | " << fixed(e.mean_dice, 3) << " | " << fixed(e.mean_hd, 2) << " |\n";
        }
    }
    if (a.output)
        write_output(*a.output, text.str());
    else
        ctx.out << text.str();
}

// ---- robustness -----------------------------------------------------------

struct RobustnessArgs {
    std::vector<fs::path> metrics;
    std::vector<std::string> names;
    fs::path output;
    std::optional<fs::path> csv;
    std::size_t trials_inner = 100;
    std::size_t trials_outer = 20;
    double split_fraction = 0.5;
};

std::string robustness_markdown(const RobustnessReport& r) {
    std::ostringstream md;
    md << "| model | reference rank | reference score | violation % (mean) | std |\n|---|---|---|---|---|\n";
    for (const auto& name : r.reference_ranking) {
        const auto k = static_cast<std::size_t>(std::find(r.models.begin(), r.models.end(), name) - r.models.begin());
        md << "| " << name << " | " << r.reference_positions[k] + 1 << " | " << fixed(r.reference_scores[k], 3) << " | "
           << fixed(r.mean_percent[k], 2) << " | " << fixed(r.std_percent[k], 2) << " |\n";
    }
    return md.str();
}

void robustness(const RobustnessArgs& a, const Common& c, Context& ctx) {
    const auto names = model_names(a.metrics, a.names);
    std::vector<NamedTable> models;
    for (std::size_t k = 0; k < a.metrics.size(); ++k) models.push_back({names[k], read_metric_csv(a.metrics[k])});
    RobustnessConfig config;
    config.trials_inner = a.trials_inner;
    config.trials_outer = a.trials_outer;
    config.seed = resolve_seed(c, ctx);
    config.split_fraction = a.split_fraction;
    config.ablation = c.no_bootstrap;
    config.dice_percentile = c.dice_percentile;
    config.hd_percentile = c.hd_percentile;
    config.ci = {c.ci_dice, c.ci_hd};
    config.resamples = c.resamples;
    config.statistic = parse_statistic(c.statistic);
    config.threads = c.threads;
    const auto report = robustness_experiment(models, config);

    std::string text;
    if (c.format == "json") text = robustness_to_json(report);
    else if (c.format == "csv") text = robustness_to_csv(report);
    else text = robustness_markdown(report);
    write_output(a.output, text);
    if (a.csv) write_output(*a.csv, robustness_to_csv(report));
    ctx.out << robustness_markdown(report);
}

// ---- ure ------------------------------------------------------------------

struct UreArgs {
    fs::path metrics;
    std::string organ;
    std::string indicator = "dice";
    double requirement = 0.0;
    std::optional<double> ci;
};

void ure(const UreArgs& a, const Common& c, Context& ctx) {
    const auto table = read_metric_csv(a.metrics);
    const auto it = std::find(table.organs().begin(), table.organs().end(), a.organ);
    if (it == table.organs().end()) throw Error("organ '" + a.organ + "' not in " + a.metrics.string());
    const auto j = static_cast<std::size_t>(it - table.organs().begin());
    const bool dice = a.indicator == "dice";
    UsableRegionOptions options;
    options.ci_percentile = a.ci ? *a.ci : (dice ? c.ci_dice : c.ci_hd);
    options.resamples = c.resamples;
    options.statistic = parse_statistic(c.statistic);
    options.seed = resolve_seed(c, ctx);
    options.use_bootstrap = !c.no_bootstrap;
    options.organ_index = j;
    const auto metric = dice ? table.dice_column(j) : table.hd_column(j);
    const auto conf = table.conf_column(j);
    const double value = usable_region(metric, conf, table.sample_ids(), a.requirement,
                                       dice ? Direction::higher_better : Direction::lower_better, options);
    ctx.out << "ure " << fixed(value) << "\n";
}

// ---- calibration ----------------------------------------------------------

struct CalibrationArgs {
    fs::path metrics;
    std::optional<fs::path> output;
    std::string level = "per-sample";
};

void calibration(const CalibrationArgs& a, Context& ctx) {
    const auto table = read_metric_csv(a.metrics);
    const auto level = a.level == "per-sample" ? CalibrationLevel::per_sample : CalibrationLevel::per_sample_organ;
    const auto report = calibration_report(table, level);
    if (a.output) write_output(*a.output, calibration_to_json(report));
    ctx.out << "ece " << fixed(report.ece) << " mce " << fixed(report.mce) << "\n";
}

// ---- synth ----------------------------------------------------------------

struct SynthArgs {
    fs::path out_dir;
    std::size_t samples = 4;
    std::size_t organs = 2;
    std::vector<std::size_t> shape{24, 24, 24};
    std::vector<double> spacing{1.0, 1.0, 1.0};
    unsigned radius = 0;
    bool random_radius = false;
    std::string morphology = "dilate";
    std::string confidence = "calibrated";
    double offset = 0.0;
};

void synth(const SynthArgs& a, const Common& c, Context& ctx) {
    SynthSpec spec;
    spec.samples = a.samples;
    spec.organs = a.organs;
    spec.shape = {a.shape[0], a.shape[1], a.shape[2]};
    spec.spacing = {a.spacing[0], a.spacing[1], a.spacing[2]};
    spec.profiles = {OrganProfile{a.radius, a.random_radius, parse_morphology(a.morphology),
                                  parse_confidence_model(a.confidence), a.offset}};
    spec.seed = resolve_seed(c, ctx);
    const auto manifest = generate_dataset(spec, a.out_dir);
    ctx.out << "wrote " << manifest.sample_count() << " samples to " << (a.out_dir / "manifest.json").string() << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Context ctx{out, err};
    CLI::App app{"Confidence-aware multi-organ segmentation scoring"};
    app.name("mimo");
    app.require_subcommand(1);
    Common common;

    ComputeArgs compute_args;
    auto* compute_cmd = app.add_subcommand("compute-metrics", "Dice, Hausdorff and confidence table from a manifest");
    compute_cmd->add_option("-m,--manifest", compute_args.manifest, "Dataset manifest (JSON)")->required();
    compute_cmd->add_option("-o,--output", compute_args.output, "Metric table CSV")->required();
    compute_cmd->add_option("--conf-mode", compute_args.conf_mode, "Confidence aggregation")
        ->check(CLI::IsMember({"predicted-voxels", "channel-mean"}))
        ->capture_default_str();
    compute_cmd->add_option("--calibration", compute_args.calibration, "Also write ECE/MCE JSON here");
    add_threads_flag(compute_cmd, common);

    ThresholdArgs threshold_args;
    auto* threshold_cmd = app.add_subcommand("thresholds", "Per-organ thresholds from a metric table");
    threshold_cmd->add_option("--metrics", threshold_args.metrics, "Metric table CSV")->required();
    threshold_cmd->add_option("-o,--output", threshold_args.output, "Threshold JSON")->required();
    threshold_cmd->add_option("--sweep", threshold_args.sweep, "Write thresholds for a percentile grid as CSV");
    threshold_cmd->add_option("--grid", threshold_args.grid, "Comma-separated percentiles for --sweep (default 5..95 by 5)");
    add_threshold_flags(threshold_cmd, common);
    add_bootstrap_flags(threshold_cmd, common);

    ScoreArgs score_args;
    auto* score_cmd = app.add_subcommand("score", "Confidence-screened usability score");
    score_cmd->add_option("--metrics", score_args.metrics, "Metric table CSV")->required();
    score_cmd->add_option("--thresholds", score_args.thresholds, "External threshold JSON (default: derive from the table)");
    score_cmd->add_option("-o,--output", score_args.output, "Report in --format");
    score_cmd->add_option("--pass-fail", score_args.pass_fail, "Per sample and organ pass/fail CSV");
    score_cmd->add_option("--sweep", score_args.sweep, "Score surface over a threshold percentile grid as CSV");
    score_cmd->add_option("--grid", score_args.grid, "Comma-separated percentiles for --sweep (default 5..95 by 10)");
    add_threshold_flags(score_cmd, common);
    add_ci_flags(score_cmd, common);
    add_bootstrap_flags(score_cmd, common);
    add_format_flag(score_cmd, common, {"json", "csv", "md"});

    CompareArgs compare_args;
    auto* compare_cmd = app.add_subcommand("compare", "Leaderboard over several models");
    compare_cmd->add_option("--metrics", compare_args.metrics, "Metric table CSV, once per model")->required();
    compare_cmd->add_option("--name", compare_args.names, "Model name, once per --metrics (default: file stem)");
    compare_cmd->add_option("--thresholds", compare_args.thresholds, "Shared external thresholds");
    compare_cmd->add_option("-o,--output", compare_args.output, "Leaderboard file (default: stdout)");
    add_threshold_flags(compare_cmd, common);
    add_ci_flags(compare_cmd, common);
    add_bootstrap_flags(compare_cmd, common);
    add_format_flag(compare_cmd, common, {"json", "csv", "md"});

    RobustnessArgs robustness_args;
    auto* robustness_cmd = app.add_subcommand("robustness", "Split-half rank violation experiment");
    robustness_cmd->add_option("--metrics", robustness_args.metrics, "Metric table CSV, once per model")->required();
    robustness_cmd->add_option("--name", robustness_args.names, "Model name, once per --metrics (default: file stem)");
    robustness_cmd->add_option("-o,--output", robustness_args.output, "Report in --format")->required();
    robustness_cmd->add_option("--csv", robustness_args.csv, "Also write model,mean_percent,std_percent CSV");
    robustness_cmd->add_option("--trials-inner", robustness_args.trials_inner, "Splits per repetition")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    robustness_cmd->add_option("--trials-outer", robustness_args.trials_outer, "Repetitions")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    robustness_cmd->add_option("--split-fraction", robustness_args.split_fraction, "Share of samples used for thresholds")
        ->capture_default_str();
    add_threshold_flags(robustness_cmd, common);
    add_ci_flags(robustness_cmd, common);
    add_bootstrap_flags(robustness_cmd, common);
    add_threads_flag(robustness_cmd, common);
    add_format_flag(robustness_cmd, common, {"json", "csv", "md"});

    UreArgs ure_args;
    auto* ure_cmd = app.add_subcommand("ure", "Usable region estimate for one organ and indicator");
    ure_cmd->add_option("--metrics", ure_args.metrics, "Metric table CSV")->required();
    ure_cmd->add_option("--organ", ure_args.organ, "Organ name")->required();
    ure_cmd->add_option("--indicator", ure_args.indicator, "dice or hd")
        ->check(CLI::IsMember({"dice", "hd"}))
        ->capture_default_str();
    ure_cmd->add_option("--requirement", ure_args.requirement, "Bound the prefix must meet")->required();
    ure_cmd->add_option("--ci", ure_args.ci, "Bound percentile (default --ci-dice or --ci-hd)");
    add_ci_flags(ure_cmd, common);
    add_bootstrap_flags(ure_cmd, common);

    CalibrationArgs calibration_args;
    auto* calibration_cmd = app.add_subcommand("calibration", "ECE and MCE of a metric table");
    calibration_cmd->add_option("--metrics", calibration_args.metrics, "Metric table CSV")->required();
    calibration_cmd->add_option("-o,--output", calibration_args.output, "JSON report");
    calibration_cmd->add_option("--level", calibration_args.level, "Pairing of scores and confidences")
        ->check(CLI::IsMember({"per-sample", "per-sample-organ"}))
        ->capture_default_str();

    SynthArgs synth_args;
    auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic volumetric dataset");
    synth_cmd->add_option("-o,--out-dir", synth_args.out_dir, "Output directory")->required();
    synth_cmd->add_option("--samples", synth_args.samples, "Sample count")->capture_default_str();
    synth_cmd->add_option("--organs", synth_args.organs, "Organ count")->capture_default_str();
    synth_cmd->add_option("--shape", synth_args.shape, "Volume shape D H W")->expected(3)->capture_default_str();
    synth_cmd->add_option("--spacing", synth_args.spacing, "Voxel spacing in mm, same axis order")
        ->expected(3)
        ->capture_default_str();
    synth_cmd->add_option("--radius", synth_args.radius, "Boundary perturbation in voxels")->capture_default_str();
    synth_cmd->add_flag("--random-radius", synth_args.random_radius, "Draw the radius from [0, radius] per sample");
    synth_cmd->add_option("--morphology", synth_args.morphology, "dilate, erode or alternate")
        ->check(CLI::IsMember({"dilate", "erode", "alternate"}))
        ->capture_default_str();
    synth_cmd->add_option("--confidence-model", synth_args.confidence, "calibrated, overconfident or underconfident")
        ->check(CLI::IsMember({"calibrated", "overconfident", "underconfident"}))
        ->capture_default_str();
    synth_cmd->add_option("--offset", synth_args.offset, "Confidence offset for miscalibrated models")
        ->capture_default_str();
    synth_cmd->add_option("--seed", common.seed, "Seed; a random seed is chosen and printed when omitted");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? 0 : 2;
    }

    try {
        if (*compute_cmd) compute_metrics(compute_args, common, ctx);
        else if (*threshold_cmd) thresholds(threshold_args, common, ctx);
        else if (*score_cmd) score(score_args, common, ctx);
        else if (*compare_cmd) compare(compare_args, common, ctx);
        else if (*robustness_cmd) robustness(robustness_args, common, ctx);
        else if (*ure_cmd) ure(ure_args, common, ctx);
        else if (*calibration_cmd) calibration(calibration_args, ctx);
        else if (*synth_cmd) synth(synth_args, common, ctx);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace mimo::cli
