#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

namespace mimo {

// (axis0, axis1, axis2) = (depth, height, width) voxel counts.
using Shape3 = std::array<std::size_t, 3>;
// Millimeters per voxel, in the same axis order as Shape3.
using Spacing = std::array<double, 3>;

inline constexpr Spacing kUnitSpacing{1.0, 1.0, 1.0};

inline std::size_t voxel_count(const Shape3& shape) { return shape[0] * shape[1] * shape[2]; }

/// Per-voxel class labels: 0 is background, 1..m are organs. C-order.
struct LabelVolume {
    Shape3 shape{1, 1, 1};
    std::vector<std::uint16_t> labels;
    Spacing spacing = kUnitSpacing;

    std::size_t size() const { return labels.size(); }
    std::uint16_t at(std::size_t d, std::size_t h, std::size_t w) const {
        return labels[(d * shape[1] + h) * shape[2] + w];
    }
};

/// Post-softmax class probabilities laid out as [classes, depth, height, width].
/// Channel 0 is background.
struct ProbabilityVolume {
    std::size_t classes = 0;
    Shape3 shape{1, 1, 1};
    std::vector<float> probs;

    std::size_t voxels() const { return voxel_count(shape); }
    float at(std::size_t channel, std::size_t voxel) const { return probs[channel * voxels() + voxel]; }
};

inline constexpr double kProbabilitySumTolerance = 1e-4;

// Validation throws mimo::Error naming the first violation found.
void validate(const LabelVolume& volume, std::optional<unsigned> max_label = std::nullopt);
void validate(const ProbabilityVolume& volume, std::size_t expected_classes);

LabelVolume load_label_volume(const std::filesystem::path& path, const Spacing& spacing = kUnitSpacing,
                              std::optional<unsigned> max_label = std::nullopt);
ProbabilityVolume load_probability_volume(const std::filesystem::path& path,
                                          std::size_t expected_classes);

// Labels are written as uint8 when they fit, uint16 otherwise; probabilities as float32.
void save_label_volume(const std::filesystem::path& path, const LabelVolume& volume);
void save_probability_volume(const std::filesystem::path& path, const ProbabilityVolume& volume);

}  // namespace mimo
