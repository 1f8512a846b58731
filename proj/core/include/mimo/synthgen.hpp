#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "mimo/manifest.hpp"
#include "mimo/metric_table.hpp"
#include "mimo/volume.hpp"

namespace mimo {

enum class ConfidenceModel { calibrated, overconfident, underconfident };
enum class Morphology { dilate, erode, alternate };

ConfidenceModel parse_confidence_model(const std::string& text);
Morphology parse_morphology(const std::string& text);

struct OrganProfile {
    unsigned radius = 0;         // boundary perturbation in voxels
    bool random_radius = false;  // draw the radius uniformly from [0, radius] per sample
    Morphology morphology = Morphology::dilate;
    ConfidenceModel confidence = ConfidenceModel::calibrated;
    double confidence_offset = 0.0;  // for over/underconfident models
};

/// Volumetric synthetic dataset. Each organ is an axis-aligned box inside
/// its own lattice cell; predictions are the box grown or shrunk by the
/// perturbation radius.
struct SynthSpec {
    std::size_t samples = 4;
    std::size_t organs = 2;
    Shape3 shape{24, 24, 24};
    Spacing spacing = kUnitSpacing;
    std::vector<OrganProfile> profiles;  // one per organ, or one shared by all
    std::uint64_t seed = 0;
    std::vector<std::string> organ_names;  // defaults to organ1..organm

    void validate() const;
};

/// Writes gt/pred/prob NPY volumes plus manifest.json into `out_dir` and
/// returns the manifest. Predicted-organ voxels carry max probability equal
/// to the organ's target confidence (Dice for calibrated, Dice +/- offset
/// otherwise, kept above 1/classes so the argmax is the predicted label).
DatasetManifest generate_dataset(const SynthSpec& spec, const std::filesystem::path& out_dir);

/// Target confidence for a given true Dice under a confidence model.
double target_confidence(double dice, ConfidenceModel model, double offset, std::size_t classes);

struct ColumnDistribution {
    double dice_mean = 0.8;
    double dice_spread = 0.1;  // standard deviation, clipped to [0, 1]
    double hd_mean = 5.0;
    double hd_spread = 2.0;    // clipped at 0
    double conf_offset = 0.0;  // conf = clamp(dice + offset + noise)
    double conf_noise = 0.05;
    double missing_rate = 0.0;  // cells with dice 0, hd +inf
};

/// Table sampled directly, without volumes. `columns` has one entry per
/// organ or a single entry shared by all organs.
MetricTable generate_metric_table(std::size_t samples, std::size_t organs, std::span<const ColumnDistribution> columns,
                                  std::uint64_t seed);

/// Table whose MIMO qualified count for organ j is exactly qualified[j],
/// under any thresholds with t_dice <= 1 and t_hd >= 0: the qualified[j]
/// most confident samples have Dice 1 and HD 0, the rest Dice 0 and HD +inf.
/// Confidences are distinct.
MetricTable planted_table(std::size_t samples, std::span<const std::size_t> qualified, std::uint64_t seed);

}  // namespace mimo
