#include "mimo/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "mimo/error.hpp"
#include "mimo/kdtree.hpp"
#include "mimo/parallel.hpp"

namespace mimo {

std::size_t OrganMask::count() const {
    return static_cast<std::size_t>(std::count(voxels.begin(), voxels.end(), std::uint8_t{1}));
}

OrganMask extract_organ_mask(const LabelVolume& volume, unsigned organ_index, std::size_t organ_count) {
    if (organ_index < 1 || organ_index > organ_count)
        throw Error("organ index " + std::to_string(organ_index) + " outside 1.." + std::to_string(organ_count));
    OrganMask mask;
    mask.shape = volume.shape;
    mask.spacing = volume.spacing;
    mask.voxels.resize(volume.labels.size());
    for (std::size_t i = 0; i < volume.labels.size(); ++i) mask.voxels[i] = volume.labels[i] == organ_index ? 1 : 0;
    return mask;
}

double dice(const OrganMask& ground_truth, const OrganMask& prediction) {
    if (ground_truth.shape != prediction.shape || ground_truth.voxels.size() != prediction.voxels.size())
        throw Error("dice: mask shapes differ");
    std::uint64_t overlap = 0, g = 0, v = 0;
    for (std::size_t i = 0; i < ground_truth.voxels.size(); ++i) {
        const std::uint64_t gi = ground_truth.voxels[i], vi = prediction.voxels[i];
        overlap += gi * vi;
        g += gi;
        v += vi;
    }
    if (g + v == 0) return 1.0;
    return (2.0 * static_cast<double>(overlap)) / static_cast<double>(g + v);
}

SurfacePointSet extract_surface(const OrganMask& mask) {
    const auto [nd, nh, nw] = mask.shape;
    SurfacePointSet surface;
    auto fg = [&](std::size_t d, std::size_t h, std::size_t w) { return mask.voxels[(d * nh + h) * nw + w] != 0; };
    for (std::size_t d = 0; d < nd; ++d)
        for (std::size_t h = 0; h < nh; ++h)
            for (std::size_t w = 0; w < nw; ++w) {
                if (!fg(d, h, w)) continue;
                const bool interior = d > 0 && d + 1 < nd && h > 0 && h + 1 < nh && w > 0 && w + 1 < nw &&
                                      fg(d - 1, h, w) && fg(d + 1, h, w) && fg(d, h - 1, w) && fg(d, h + 1, w) &&
                                      fg(d, h, w - 1) && fg(d, h, w + 1);
                if (interior) continue;
                surface.points.push_back({(static_cast<double>(d) + 0.5) * mask.spacing[0],
                                          (static_cast<double>(h) + 0.5) * mask.spacing[1],
                                          (static_cast<double>(w) + 0.5) * mask.spacing[2]});
            }
    return surface;
}

double directed_hausdorff_squared(const SurfacePointSet& from, const SurfacePointSet& to) {
    if (from.empty()) return 0.0;
    if (to.empty()) return kInfiniteDistance;
    const PointIndex index(to.points);
    double worst = 0.0;
    for (const auto& p : from.points) {
        // A neighbour at or below the running maximum cannot raise it, so the
        // query may stop there.
        const double d2 = index.nearest_squared(p, worst);
        if (d2 > worst) worst = d2;
    }
    return worst;
}

double hausdorff_squared(const SurfacePointSet& ground_truth, const SurfacePointSet& prediction) {
    if (ground_truth.empty() && prediction.empty()) return 0.0;
    if (ground_truth.empty() || prediction.empty()) return kInfiniteDistance;
    return std::max(directed_hausdorff_squared(ground_truth, prediction),
                    directed_hausdorff_squared(prediction, ground_truth));
}

double hausdorff(const SurfacePointSet& ground_truth, const SurfacePointSet& prediction) {
    return std::sqrt(hausdorff_squared(ground_truth, prediction));
}

const char* to_string(ConfidenceMode mode) {
    return mode == ConfidenceMode::predicted_voxels ? "predicted-voxels" : "channel-mean";
}

ConfidenceMode parse_confidence_mode(const std::string& text) {
    if (text == "predicted-voxels") return ConfidenceMode::predicted_voxels;
    if (text == "channel-mean") return ConfidenceMode::channel_mean;
    throw Error("unknown confidence mode '" + text + "' (expected predicted-voxels or channel-mean)");
}

namespace {

void require_aligned(const ProbabilityVolume& prob, const LabelVolume& prediction) {
    if (prob.shape != prediction.shape) throw Error("probability volume and prediction have different spatial shapes");
}

float max_probability(const ProbabilityVolume& prob, std::size_t voxel) {
    float best = prob.at(0, voxel);
    for (std::size_t c = 1; c < prob.classes; ++c) best = std::max(best, prob.at(c, voxel));
    return best;
}

}  // namespace

void check_argmax_consistency(const ProbabilityVolume& prob, const LabelVolume& prediction) {
    require_aligned(prob, prediction);
    const std::size_t voxels = prob.voxels();
    std::size_t mismatched = 0;
    for (std::size_t v = 0; v < voxels; ++v) {
        const auto label = prediction.labels[v];
        if (label >= prob.classes)
            throw Error("predicted label " + std::to_string(label) + " has no probability channel");
        if (prob.at(label, v) < max_probability(prob, v)) ++mismatched;
    }
    const double rate = static_cast<double>(mismatched) / static_cast<double>(voxels);
    if (rate > kMaxArgmaxMismatchRate)
        throw Error("prediction disagrees with probability argmax at " + std::to_string(mismatched) + " of " +
                    std::to_string(voxels) + " voxels; prediction and probability files look mismatched");
}

double confidence(const ProbabilityVolume& prob, const LabelVolume& prediction, unsigned organ_index,
                  ConfidenceMode mode) {
    require_aligned(prob, prediction);
    if (organ_index < 1 || organ_index >= prob.classes)
        throw Error("organ index " + std::to_string(organ_index) + " has no probability channel");
    const std::size_t voxels = prob.voxels();
    double sum = 0.0;
    std::size_t count = 0;
    if (mode == ConfidenceMode::channel_mean) {
        for (std::size_t v = 0; v < voxels; ++v) sum += prob.at(organ_index, v);
        count = voxels;
    } else {
        for (std::size_t v = 0; v < voxels; ++v) {
            if (prediction.labels[v] != organ_index) continue;
            sum += max_probability(prob, v);
            ++count;
        }
    }
    if (count == 0) return 0.0;
    return std::clamp(sum / static_cast<double>(count), 0.0, 1.0);
}

std::vector<CellMetrics> compute_sample_metrics(const LabelVolume& ground_truth, const LabelVolume& prediction,
                                                const ProbabilityVolume* prob, std::size_t organ_count,
                                                ConfidenceMode mode) {
    if (ground_truth.shape != prediction.shape) throw Error("ground truth and prediction shapes differ");
    if (prob) check_argmax_consistency(*prob, prediction);

    std::vector<CellMetrics> cells(organ_count);
    for (std::size_t j = 0; j < organ_count; ++j) {
        const auto organ = static_cast<unsigned>(j + 1);
        const auto g = extract_organ_mask(ground_truth, organ, organ_count);
        const auto v = extract_organ_mask(prediction, organ, organ_count);
        cells[j].dice = dice(g, v);
        cells[j].hd = hausdorff(extract_surface(g), extract_surface(v));
        if (prob) cells[j].conf = confidence(*prob, prediction, organ, mode);
    }
    return cells;
}

MetricTable build_metric_table(const DatasetManifest& manifest, const TableBuildOptions& options) {
    validate(manifest, true);
    const std::size_t m = manifest.organ_count();
    std::vector<std::string> ids;
    for (const auto& s : manifest.samples) ids.push_back(s.id);
    MetricTable table(ids, manifest.organs);

    parallel_for(manifest.sample_count(), options.threads, [&](std::size_t i) {
        const auto& sample = manifest.samples[i];
        try {
            if (!sample.probabilities)
                throw Error("no probability volume ('prob') listed; confidence cannot be computed");
            const auto max_label = static_cast<unsigned>(m);
            const auto gt = load_label_volume(sample.ground_truth, sample.spacing, max_label);
            const auto pred = load_label_volume(sample.prediction, sample.spacing, max_label);
            const auto prob = load_probability_volume(*sample.probabilities, m + 1);
            const auto cells = compute_sample_metrics(gt, pred, &prob, m, options.confidence_mode);
            for (std::size_t j = 0; j < m; ++j) {
                table.dice(i, j) = cells[j].dice;
                table.hd(i, j) = cells[j].hd;
                table.conf(i, j) = cells[j].conf;
            }
        } catch (const Error& e) {
            throw Error("sample '" + sample.id + "': " + e.what());
        }
    });
    return table;
}

}  // namespace mimo
