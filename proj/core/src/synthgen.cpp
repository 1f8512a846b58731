#include "mimo/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "mimo/error.hpp"
#include "mimo/rng.hpp"

namespace mimo {
namespace fs = std::filesystem;

ConfidenceModel parse_confidence_model(const std::string& text) {
    if (text == "calibrated") return ConfidenceModel::calibrated;
    if (text == "overconfident") return ConfidenceModel::overconfident;
    if (text == "underconfident") return ConfidenceModel::underconfident;
    throw Error("unknown confidence model '" + text + "'");
}

Morphology parse_morphology(const std::string& text) {
    if (text == "dilate") return Morphology::dilate;
    if (text == "erode") return Morphology::erode;
    if (text == "alternate") return Morphology::alternate;
    throw Error("unknown morphology '" + text + "'");
}

namespace {

std::string padded(const char* prefix, std::size_t value, int width) {
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%s%0*zu", prefix, width, value);
    return buffer;
}

std::vector<std::string> default_organ_names(std::size_t m) {
    std::vector<std::string> names;
    for (std::size_t j = 1; j <= m; ++j) names.push_back(padded("organ", j, 2));
    return names;
}

std::vector<std::string> default_sample_ids(std::size_t n) {
    std::vector<std::string> ids;
    for (std::size_t s = 0; s < n; ++s) ids.push_back(padded("case", s, 3));
    return ids;
}

const OrganProfile& profile_for(const SynthSpec& spec, std::size_t organ) {
    return spec.profiles.size() == 1 ? spec.profiles.front() : spec.profiles[organ];
}

struct Lattice {
    std::array<std::size_t, 3> cells{1, 1, 1};
    std::array<std::size_t, 3> extent{0, 0, 0};  // voxels per cell along each axis
};

// Grid of at least m cells maximising the smallest cell side.
Lattice choose_lattice(const Shape3& shape, std::size_t m) {
    Lattice best;
    std::size_t best_side = 0;
    for (std::size_t a = 1; a <= m; ++a)
        for (std::size_t b = 1; b <= m; ++b)
            for (std::size_t c = 1; c <= m; ++c) {
                if (a * b * c < m || a > shape[0] || b > shape[1] || c > shape[2]) continue;
                const std::size_t side = std::min({shape[0] / a, shape[1] / b, shape[2] / c});
                if (side > best_side) {
                    best_side = side;
                    best.cells = {a, b, c};
                }
            }
    if (best_side == 0) throw Error("synthgen: volume too small to host " + std::to_string(m) + " organs");
    for (int axis = 0; axis < 3; ++axis) best.extent[axis] = shape[axis] / best.cells[axis];
    return best;
}

struct Box {
    std::array<std::size_t, 3> lo{};
    std::array<std::size_t, 3> hi{};  // exclusive

    std::size_t volume() const { return (hi[0] - lo[0]) * (hi[1] - lo[1]) * (hi[2] - lo[2]); }
};

void paint(LabelVolume& volume, const Box& box, std::uint16_t label) {
    for (std::size_t d = box.lo[0]; d < box.hi[0]; ++d)
        for (std::size_t h = box.lo[1]; h < box.hi[1]; ++h)
            for (std::size_t w = box.lo[2]; w < box.hi[2]; ++w)
                volume.labels[(d * volume.shape[1] + h) * volume.shape[2] + w] = label;
}

}  // namespace

void SynthSpec::validate() const {
    if (samples < 1) throw Error("synthgen: need at least one sample");
    if (organs < 1) throw Error("synthgen: need at least one organ");
    if (organs > 0xfffe) throw Error("synthgen: too many organs");
    for (auto extent : shape)
        if (extent < 1) throw Error("synthgen: shape components must be at least 1");
    for (double s : spacing)
        if (!(s > 0.0) || !std::isfinite(s)) throw Error("synthgen: spacing must be positive");
    if (profiles.size() != 1 && profiles.size() != organs)
        throw Error("synthgen: need one organ profile or one per organ");
    for (const auto& p : profiles)
        if (!(p.confidence_offset >= 0.0 && p.confidence_offset <= 1.0))
            throw Error("synthgen: confidence offset must lie in [0, 1]");
    if (!organ_names.empty() && organ_names.size() != organs) throw Error("synthgen: organ name count mismatch");
}

double target_confidence(double dice, ConfidenceModel model, double offset, std::size_t classes) {
    double p = dice;
    if (model == ConfidenceModel::overconfident) p = dice + offset;
    if (model == ConfidenceModel::underconfident) p = dice - offset;
    // Strictly above the uniform share so the predicted label stays the argmax.
    const double floor = 1.0 / static_cast<double>(classes) + 0.01;
    return std::clamp(p, std::min(floor, 1.0), 1.0);
}

DatasetManifest generate_dataset(const SynthSpec& spec, const fs::path& out_dir) {
    spec.validate();
    const std::size_t m = spec.organs, classes = m + 1;
    const Lattice lattice = choose_lattice(spec.shape, m);

    unsigned max_radius = 0;
    for (std::size_t j = 0; j < m; ++j) max_radius = std::max(max_radius, profile_for(spec, j).radius);
    // Box plus radius+1 margin on both sides, and enough side to survive erosion.
    for (std::size_t j = 0; j < m; ++j) {
        const unsigned r = profile_for(spec, j).radius;
        const std::size_t min_side = 2 * std::size_t{r} + 2;
        for (int axis = 0; axis < 3; ++axis)
            if (lattice.extent[axis] < min_side + 2 * (std::size_t{r} + 1))
                throw Error("synthgen: organs do not fit: lattice cell of " + std::to_string(lattice.extent[axis]) +
                            " voxels cannot hold a box perturbed by radius " + std::to_string(r));
    }

    fs::create_directories(out_dir);
    DatasetManifest manifest;
    manifest.organs = spec.organ_names.empty() ? default_organ_names(m) : spec.organ_names;
    const auto ids = default_sample_ids(spec.samples);

    for (std::size_t s = 0; s < spec.samples; ++s) {
        Rng rng(derive_seed(spec.seed, {s}));
        LabelVolume gt, pred;
        gt.shape = pred.shape = spec.shape;
        gt.spacing = pred.spacing = spec.spacing;
        gt.labels.assign(voxel_count(spec.shape), 0);
        pred.labels.assign(voxel_count(spec.shape), 0);
        std::vector<double> organ_conf(m, 0.0);

        for (std::size_t j = 0; j < m; ++j) {
            const auto& profile = profile_for(spec, j);
            const std::size_t cell = j;
            const std::array<std::size_t, 3> cell_index{cell / (lattice.cells[1] * lattice.cells[2]),
                                                        (cell / lattice.cells[2]) % lattice.cells[1],
                                                        cell % lattice.cells[2]};
            const std::size_t margin = std::size_t{profile.radius} + 1;
            const std::size_t min_side = 2 * std::size_t{profile.radius} + 2;

            Box box;
            for (int axis = 0; axis < 3; ++axis) {
                const std::size_t cell_lo = cell_index[axis] * lattice.extent[axis];
                const std::size_t max_side = lattice.extent[axis] - 2 * margin;
                const std::size_t side = min_side + rng.below(max_side - min_side + 1);
                const std::size_t slack = lattice.extent[axis] - 2 * margin - side;
                box.lo[axis] = cell_lo + margin + rng.below(slack + 1);
                box.hi[axis] = box.lo[axis] + side;
            }

            const std::size_t r = profile.random_radius ? rng.below(std::size_t{profile.radius} + 1) : profile.radius;
            bool grow = profile.morphology == Morphology::dilate;
            if (profile.morphology == Morphology::alternate) grow = s % 2 == 0;
            Box predicted = box;
            for (int axis = 0; axis < 3; ++axis) {
                if (grow) {
                    predicted.lo[axis] -= r;
                    predicted.hi[axis] += r;
                } else {
                    predicted.lo[axis] += r;
                    predicted.hi[axis] -= r;
                }
            }
            const auto label = static_cast<std::uint16_t>(j + 1);
            paint(gt, box, label);
            paint(pred, predicted, label);

            // Boxes are nested, so the overlap is the smaller one.
            const std::size_t g = box.volume(), v = predicted.volume();
            const double dice = 2.0 * static_cast<double>(std::min(g, v)) / static_cast<double>(g + v);
            organ_conf[j] = target_confidence(dice, profile.confidence, profile.confidence_offset, classes);
        }

        ProbabilityVolume prob;
        prob.classes = classes;
        prob.shape = spec.shape;
        const std::size_t voxels = voxel_count(spec.shape);
        prob.probs.assign(classes * voxels, 0.0f);
        for (std::size_t v = 0; v < voxels; ++v) {
            const auto label = pred.labels[v];
            if (label == 0) {
                prob.probs[v] = 1.0f;
                continue;
            }
            const double p = organ_conf[label - 1];
            const auto rest = static_cast<float>((1.0 - p) / static_cast<double>(classes - 1));
            for (std::size_t c = 0; c < classes; ++c) prob.probs[c * voxels + v] = rest;
            prob.probs[label * voxels + v] = static_cast<float>(p);
        }

        SampleEntry entry;
        entry.id = ids[s];
        entry.ground_truth = out_dir / (ids[s] + "_gt.npy");
        entry.prediction = out_dir / (ids[s] + "_pred.npy");
        entry.probabilities = out_dir / (ids[s] + "_prob.npy");
        entry.spacing = spec.spacing;
        save_label_volume(entry.ground_truth, gt);
        save_label_volume(entry.prediction, pred);
        save_probability_volume(*entry.probabilities, prob);
        manifest.samples.push_back(std::move(entry));
    }
    save_manifest(out_dir / "manifest.json", manifest);
    return manifest;
}

MetricTable generate_metric_table(std::size_t samples, std::size_t organs, std::span<const ColumnDistribution> columns,
                                  std::uint64_t seed) {
    if (samples < 1 || organs < 1) throw Error("synthgen: table needs at least one sample and one organ");
    if (columns.size() != 1 && columns.size() != organs)
        throw Error("synthgen: need one column distribution or one per organ");
    for (const auto& c : columns) {
        if (!(c.dice_mean >= 0.0 && c.dice_mean <= 1.0)) throw Error("synthgen: dice mean must lie in [0, 1]");
        if (!(c.dice_spread >= 0.0) || !(c.hd_spread >= 0.0) || !(c.conf_noise >= 0.0) || !(c.hd_mean >= 0.0))
            throw Error("synthgen: spreads and HD mean must be non-negative");
        if (!(c.missing_rate >= 0.0 && c.missing_rate <= 1.0)) throw Error("synthgen: missing rate must lie in [0, 1]");
        if (!std::isfinite(c.conf_offset)) throw Error("synthgen: confidence offset must be finite");
    }

    MetricTable table(default_sample_ids(samples), default_organ_names(organs));
    for (std::size_t j = 0; j < organs; ++j) {
        const auto& dist = columns.size() == 1 ? columns.front() : columns[j];
        Rng rng(derive_seed(seed, {j}));
        for (std::size_t s = 0; s < samples; ++s) {
            const bool missing = rng.uniform() < dist.missing_rate;
            const double dice = missing ? 0.0 : std::clamp(dist.dice_mean + dist.dice_spread * rng.normal(), 0.0, 1.0);
            const double hd = missing ? std::numeric_limits<double>::infinity()
                                      : std::max(0.0, dist.hd_mean + dist.hd_spread * rng.normal());
            const double conf = std::clamp(dice + dist.conf_offset + dist.conf_noise * rng.normal(), 0.0, 1.0);
            table.dice(s, j) = dice;
            table.hd(s, j) = hd;
            table.conf(s, j) = conf;
        }
    }
    return table;
}

MetricTable planted_table(std::size_t samples, std::span<const std::size_t> qualified, std::uint64_t seed) {
    if (samples < 1 || qualified.empty()) throw Error("synthgen: planted table needs samples and organs");
    const std::size_t m = qualified.size();
    MetricTable table(default_sample_ids(samples), default_organ_names(m));
    for (std::size_t j = 0; j < m; ++j) {
        if (qualified[j] > samples)
            throw Error("synthgen: planted count " + std::to_string(qualified[j]) + " exceeds sample count");
        std::vector<std::size_t> rank(samples);
        std::iota(rank.begin(), rank.end(), std::size_t{0});
        Rng rng(derive_seed(seed, {j}));
        for (std::size_t i = samples - 1; i > 0; --i) std::swap(rank[i], rank[rng.below(i + 1)]);
        for (std::size_t s = 0; s < samples; ++s) {
            const bool pass = rank[s] < qualified[j];
            table.conf(s, j) = 1.0 - static_cast<double>(rank[s] + 1) / static_cast<double>(samples + 1);
            table.dice(s, j) = pass ? 1.0 : 0.0;
            table.hd(s, j) = pass ? 0.0 : std::numeric_limits<double>::infinity();
        }
    }
    return table;
}

}  // namespace mimo
