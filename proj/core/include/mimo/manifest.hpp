#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mimo/volume.hpp"

namespace mimo {

struct SampleEntry {
    std::string id;
    std::filesystem::path ground_truth;
    std::filesystem::path prediction;
    std::optional<std::filesystem::path> probabilities;
    Spacing spacing = kUnitSpacing;
};

/// Organ order here fixes column order for every downstream table and report.
struct DatasetManifest {
    std::vector<std::string> organs;
    std::vector<SampleEntry> samples;

    std::size_t organ_count() const { return organs.size(); }
    std::size_t sample_count() const { return samples.size(); }
};

// Checks ids are unique, organs and samples non-empty, spacing positive.
// When check_files is set every referenced path must exist.
void validate(const DatasetManifest& manifest, bool check_files = true);

/// Parses the JSON manifest. Relative paths resolve against the manifest's
/// directory. load_manifest also checks that every referenced file exists.
DatasetManifest load_manifest(const std::filesystem::path& path);
DatasetManifest parse_manifest(const std::string& json_text, const std::filesystem::path& base_dir);

/// Writes paths relative to the manifest's directory when possible.
void save_manifest(const std::filesystem::path& path, const DatasetManifest& manifest);

}  // namespace mimo
