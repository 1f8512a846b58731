#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "mimo/manifest.hpp"
#include "mimo/metric_table.hpp"
#include "mimo/volume.hpp"

namespace mimo {

inline constexpr double kInfiniteDistance = std::numeric_limits<double>::infinity();

/// Binary voxel grid for a single organ class.
struct OrganMask {
    Shape3 shape{1, 1, 1};
    std::vector<std::uint8_t> voxels;
    Spacing spacing = kUnitSpacing;

    std::size_t count() const;
};

using Point3 = std::array<double, 3>;

/// Physical (mm) centers of boundary voxels.
struct SurfacePointSet {
    std::vector<Point3> points;

    bool empty() const { return points.empty(); }
    std::size_t size() const { return points.size(); }
};

OrganMask extract_organ_mask(const LabelVolume& volume, unsigned organ_index, std::size_t organ_count);

/// 2|G ∩ V| / (|G| + |V|). Both empty scores 1.0; exactly one empty scores 0.0.
double dice(const OrganMask& ground_truth, const OrganMask& prediction);

/// Foreground voxels with at least one face neighbour (6-connectivity) that is
/// background or outside the grid. Point = (index + 0.5) * spacing per axis.
SurfacePointSet extract_surface(const OrganMask& mask);

/// Symmetric Hausdorff distance in mm. Exactly one empty set gives +inf,
/// both empty gives 0.
double hausdorff(const SurfacePointSet& ground_truth, const SurfacePointSet& prediction);

/// Square of hausdorff(); computed without any square root so that it is
/// exact whenever the coordinate arithmetic is.
double hausdorff_squared(const SurfacePointSet& ground_truth, const SurfacePointSet& prediction);

/// max_{a in from} min_{b in to} |a - b|^2, using a k-d tree over `to`.
double directed_hausdorff_squared(const SurfacePointSet& from, const SurfacePointSet& to);

enum class ConfidenceMode {
    predicted_voxels,  // mean max-softmax over voxels predicted as the organ
    channel_mean,      // mean of the organ's probability channel over all voxels
};

const char* to_string(ConfidenceMode mode);
ConfidenceMode parse_confidence_mode(const std::string& text);

// Prediction/probability pairs with more than this fraction of voxels whose
// label is not an argmax of the probabilities are rejected.
inline constexpr double kMaxArgmaxMismatchRate = 0.01;

void check_argmax_consistency(const ProbabilityVolume& prob, const LabelVolume& prediction);

double confidence(const ProbabilityVolume& prob, const LabelVolume& prediction, unsigned organ_index,
                  ConfidenceMode mode = ConfidenceMode::predicted_voxels);

struct CellMetrics {
    double dice = 0.0;
    double hd = 0.0;
    double conf = 0.0;
};

/// All organs for one sample. `prob` may be null only when confidence is not wanted,
/// in which case conf is left at 0.
std::vector<CellMetrics> compute_sample_metrics(const LabelVolume& ground_truth, const LabelVolume& prediction,
                                                const ProbabilityVolume* prob, std::size_t organ_count,
                                                ConfidenceMode mode);

struct TableBuildOptions {
    ConfidenceMode confidence_mode = ConfidenceMode::predicted_voxels;
    unsigned threads = 0;  // 0 = hardware concurrency
};

MetricTable build_metric_table(const DatasetManifest& manifest, const TableBuildOptions& options = {});

}  // namespace mimo
