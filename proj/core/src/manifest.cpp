#include "mimo/manifest.hpp"

#include <cmath>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mimo/atomic_file.hpp"
#include "mimo/error.hpp"

namespace mimo {
namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

fs::path resolve(const fs::path& base, const std::string& text) {
    fs::path p(text);
    if (p.is_relative()) p = base / p;
    return p.lexically_normal();
}

std::string relative_text(const fs::path& path, const fs::path& base) {
    auto rel = path.lexically_relative(base);
    if (rel.empty()) return path.generic_string();
    return rel.generic_string();
}

}  // namespace

void validate(const DatasetManifest& manifest, bool check_files) {
    if (manifest.organs.empty()) throw Error("manifest: organ list is empty");
    if (manifest.samples.empty()) throw Error("manifest: sample list is empty");
    std::set<std::string> organs;
    for (const auto& organ : manifest.organs) {
        if (organ.empty()) throw Error("manifest: empty organ name");
        if (!organs.insert(organ).second) throw Error("manifest: duplicate organ '" + organ + "'");
    }
    std::set<std::string> ids;
    for (const auto& sample : manifest.samples) {
        if (sample.id.empty()) throw Error("manifest: sample with empty id");
        if (!ids.insert(sample.id).second) throw Error("manifest: duplicate sample id '" + sample.id + "'");
        for (double s : sample.spacing)
            if (!(s > 0.0) || !std::isfinite(s))
                throw Error("manifest: sample '" + sample.id + "' has non-positive spacing");
        if (!check_files) continue;
        auto require = [&](const fs::path& p, const char* what) {
            if (!fs::exists(p))
                throw Error("manifest: sample '" + sample.id + "' " + what + " file not found: " + p.string());
        };
        require(sample.ground_truth, "gt");
        require(sample.prediction, "pred");
        if (sample.probabilities) require(*sample.probabilities, "prob");
    }
}

DatasetManifest parse_manifest(const std::string& json_text, const fs::path& base_dir) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(json_text);
    } catch (const std::exception& e) {
        throw Error(std::string("manifest: invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw Error("manifest: top level must be an object");
    if (!doc.contains("organs") || !doc["organs"].is_array()) throw Error("manifest: missing 'organs' array");
    if (!doc.contains("samples") || !doc["samples"].is_array()) throw Error("manifest: missing 'samples' array");

    DatasetManifest manifest;
    for (const auto& organ : doc["organs"]) {
        if (!organ.is_string()) throw Error("manifest: organ names must be strings");
        manifest.organs.push_back(organ.get<std::string>());
    }
    for (const auto& entry : doc["samples"]) {
        if (!entry.is_object()) throw Error("manifest: each sample must be an object");
        SampleEntry sample;
        auto text = [&](const char* key) -> std::string {
            if (!entry.contains(key) || !entry[key].is_string())
                throw Error(std::string("manifest: sample missing string field '") + key + "'");
            return entry[key].get<std::string>();
        };
        sample.id = text("id");
        sample.ground_truth = resolve(base_dir, text("gt"));
        sample.prediction = resolve(base_dir, text("pred"));
        if (entry.contains("prob") && !entry["prob"].is_null()) sample.probabilities = resolve(base_dir, text("prob"));
        if (entry.contains("spacing")) {
            const auto& spacing = entry["spacing"];
            if (!spacing.is_array() || spacing.size() != 3)
                throw Error("manifest: sample '" + sample.id + "' spacing must be [s0, s1, s2]");
            for (std::size_t a = 0; a < 3; ++a) {
                if (!spacing[a].is_number()) throw Error("manifest: sample '" + sample.id + "' spacing must be numeric");
                sample.spacing[a] = spacing[a].get<double>();
            }
        }
        manifest.samples.push_back(std::move(sample));
    }
    validate(manifest, false);
    return manifest;
}

DatasetManifest load_manifest(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("manifest: cannot open '" + path.string() + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    auto manifest = parse_manifest(buffer.str(), path.parent_path());
    validate(manifest, true);
    return manifest;
}

void save_manifest(const fs::path& path, const DatasetManifest& manifest) {
    validate(manifest, false);
    const fs::path base = path.parent_path().empty() ? fs::path(".") : path.parent_path();
    ordered_json doc;
    doc["organs"] = manifest.organs;
    doc["samples"] = ordered_json::array();
    for (const auto& sample : manifest.samples) {
        ordered_json entry;
        entry["id"] = sample.id;
        entry["gt"] = relative_text(sample.ground_truth, base);
        entry["pred"] = relative_text(sample.prediction, base);
        if (sample.probabilities) entry["prob"] = relative_text(*sample.probabilities, base);
        entry["spacing"] = {sample.spacing[0], sample.spacing[1], sample.spacing[2]};
        doc["samples"].push_back(std::move(entry));
    }
    write_file_atomic(path, doc.dump(2) + "\n");
}

}  // namespace mimo
