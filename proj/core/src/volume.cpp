#include "mimo/volume.hpp"

#include <cmath>
#include <span>
#include <string>

#include "mimo/error.hpp"
#include "mimo/npy.hpp"

namespace mimo {
namespace {

std::string shape_text(const Shape3& shape) {
    return "(" + std::to_string(shape[0]) + "," + std::to_string(shape[1]) + "," + std::to_string(shape[2]) + ")";
}

std::string voxel_text(const Shape3& shape, std::size_t flat) {
    const std::size_t w = flat % shape[2];
    const std::size_t h = (flat / shape[2]) % shape[1];
    const std::size_t d = flat / (shape[1] * shape[2]);
    return "(" + std::to_string(d) + "," + std::to_string(h) + "," + std::to_string(w) + ")";
}

}  // namespace

void validate(const LabelVolume& volume, std::optional<unsigned> max_label) {
    for (auto extent : volume.shape)
        if (extent < 1) throw Error("label volume has empty shape " + shape_text(volume.shape));
    for (double s : volume.spacing)
        if (!(s > 0.0) || !std::isfinite(s)) throw Error("spacing must be finite and positive, got " + std::to_string(s));
    if (volume.labels.size() != voxel_count(volume.shape))
        throw Error("label volume holds " + std::to_string(volume.labels.size()) + " voxels, shape " +
                    shape_text(volume.shape) + " needs " + std::to_string(voxel_count(volume.shape)));
    if (max_label) {
        for (std::size_t i = 0; i < volume.labels.size(); ++i)
            if (volume.labels[i] > *max_label)
                throw Error("label " + std::to_string(volume.labels[i]) + " at voxel " + voxel_text(volume.shape, i) +
                            " exceeds organ count " + std::to_string(*max_label));
    }
}

void validate(const ProbabilityVolume& volume, std::size_t expected_classes) {
    if (volume.classes != expected_classes)
        throw Error("probability volume has " + std::to_string(volume.classes) + " classes, expected " +
                    std::to_string(expected_classes));
    const std::size_t voxels = volume.voxels();
    if (volume.probs.size() != voxels * volume.classes) throw Error("probability volume size does not match its shape");
    for (std::size_t i = 0; i < volume.probs.size(); ++i) {
        const float p = volume.probs[i];
        if (!(p >= 0.0f && p <= 1.0f))
            throw Error("probability " + std::to_string(p) + " outside [0,1] in channel " + std::to_string(i / voxels) +
                        " at voxel " + voxel_text(volume.shape, i % voxels));
    }
    for (std::size_t v = 0; v < voxels; ++v) {
        double sum = 0.0;
        for (std::size_t c = 0; c < volume.classes; ++c) sum += volume.probs[c * voxels + v];
        if (std::abs(sum - 1.0) > kProbabilitySumTolerance)
            throw Error("class probabilities sum to " + std::to_string(sum) + " at voxel " + voxel_text(volume.shape, v) +
                        " (not normalized; were logits passed instead of softmax output?)");
    }
}

LabelVolume load_label_volume(const std::filesystem::path& path, const Spacing& spacing,
                              std::optional<unsigned> max_label) {
    const auto array = npy::read(path);
    if (array.shape.size() != 3)
        throw Error(path.string() + ": expected rank 3 label volume, got rank " + std::to_string(array.shape.size()));
    if (array.dtype == npy::DType::f32 || array.dtype == npy::DType::f64)
        throw Error(path.string() + ": label volume must have an integer dtype");

    LabelVolume volume;
    volume.shape = {array.shape[0], array.shape[1], array.shape[2]};
    volume.spacing = spacing;
    std::vector<std::uint64_t> raw;
    try {
        raw = array.to_unsigned();
    } catch (const Error& e) {
        throw Error(path.string() + ": " + e.what());
    }
    volume.labels.resize(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (raw[i] > 0xffff)
            throw Error(path.string() + ": label " + std::to_string(raw[i]) + " at voxel " +
                        voxel_text(volume.shape, i) + " does not fit in 16 bits");
        volume.labels[i] = static_cast<std::uint16_t>(raw[i]);
    }
    try {
        validate(volume, max_label);
    } catch (const Error& e) {
        throw Error(path.string() + ": " + e.what());
    }
    return volume;
}

ProbabilityVolume load_probability_volume(const std::filesystem::path& path, std::size_t expected_classes) {
    const auto array = npy::read(path);
    if (array.shape.size() != 4)
        throw Error(path.string() + ": expected rank 4 probability volume, got rank " +
                    std::to_string(array.shape.size()));
    ProbabilityVolume volume;
    volume.classes = array.shape[0];
    volume.shape = {array.shape[1], array.shape[2], array.shape[3]};
    const auto values = array.to_double();
    volume.probs.assign(values.begin(), values.end());
    try {
        validate(volume, expected_classes);
    } catch (const Error& e) {
        throw Error(path.string() + ": " + e.what());
    }
    return volume;
}

void save_label_volume(const std::filesystem::path& path, const LabelVolume& volume) {
    const std::size_t shape[3] = {volume.shape[0], volume.shape[1], volume.shape[2]};
    std::uint16_t max_label = 0;
    for (auto label : volume.labels) max_label = std::max(max_label, label);
    if (max_label <= 0xff) {
        std::vector<std::uint8_t> narrow(volume.labels.begin(), volume.labels.end());
        npy::write(path, shape, npy::DType::u8, std::as_bytes(std::span(narrow)));
    } else {
        npy::write(path, shape, npy::DType::u16, std::as_bytes(std::span(volume.labels)));
    }
}

void save_probability_volume(const std::filesystem::path& path, const ProbabilityVolume& volume) {
    const std::size_t shape[4] = {volume.classes, volume.shape[0], volume.shape[1], volume.shape[2]};
    npy::write(path, shape, npy::DType::f32, std::as_bytes(std::span(volume.probs)));
}

}  // namespace mimo
