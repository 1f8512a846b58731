#pragma once

// Reference implementations used only by tests. Each one follows the
// defining formula as literally as possible and shares no code with the
// library paths it checks.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <random>
#include <string>
#include <unistd.h>
#include <vector>

#include "mimo/metrics.hpp"

namespace mimo::oracle {

// Direct evaluation of 2 * sum(G*V) / (sum G + sum V).
inline double dice(const std::vector<std::uint8_t>& g, const std::vector<std::uint8_t>& v) {
    std::uint64_t num = 0, gs = 0, vs = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        num += std::uint64_t{g[i]} * v[i];
        gs += g[i];
        vs += v[i];
    }
    if (gs + vs == 0) return 1.0;
    return (2.0 * static_cast<double>(num)) / static_cast<double>(gs + vs);
}

// Surface by explicit 6-neighbour enumeration.
inline std::vector<Point3> surface(const std::vector<std::uint8_t>& mask, const Shape3& shape, const Spacing& spacing) {
    std::vector<Point3> out;
    const long nd = static_cast<long>(shape[0]), nh = static_cast<long>(shape[1]), nw = static_cast<long>(shape[2]);
    auto at = [&](long d, long h, long w) -> int {
        if (d < 0 || h < 0 || w < 0 || d >= nd || h >= nh || w >= nw) return 0;
        return mask[static_cast<std::size_t>((d * nh + h) * nw + w)];
    };
    const long offsets[6][3] = {{-1, 0, 0}, {1, 0, 0}, {0, -1, 0}, {0, 1, 0}, {0, 0, -1}, {0, 0, 1}};
    for (long d = 0; d < nd; ++d)
        for (long h = 0; h < nh; ++h)
            for (long w = 0; w < nw; ++w) {
                if (!at(d, h, w)) continue;
                bool exposed = false;
                for (const auto& o : offsets) exposed = exposed || !at(d + o[0], h + o[1], w + o[2]);
                if (exposed)
                    out.push_back({(static_cast<double>(d) + 0.5) * spacing[0], (static_cast<double>(h) + 0.5) * spacing[1],
                                   (static_cast<double>(w) + 0.5) * spacing[2]});
            }
    return out;
}

// All-pairs max-min in both directions. Distances are square roots of the
// plain sum of squared coordinate differences.
inline double hausdorff(const std::vector<Point3>& g, const std::vector<Point3>& v) {
    if (g.empty() && v.empty()) return 0.0;
    if (g.empty() || v.empty()) return std::numeric_limits<double>::infinity();
    auto dist = [](const Point3& a, const Point3& b) {
        const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
        return std::sqrt(dx * dx + dy * dy + dz * dz);
    };
    auto directed = [&](const std::vector<Point3>& from, const std::vector<Point3>& to) {
        double worst = 0.0;
        for (const auto& a : from) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& b : to) best = std::min(best, dist(a, b));
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::max(directed(g, v), directed(v, g));
}

// Random blob mask: union of a few random boxes, occasionally empty or full.
inline std::vector<std::uint8_t> random_mask(std::mt19937_64& gen, const Shape3& shape) {
    std::vector<std::uint8_t> mask(voxel_count(shape), 0);
    std::uniform_int_distribution<int> kind(0, 19);
    const int k = kind(gen);
    if (k == 0) return mask;
    if (k == 1) {
        std::fill(mask.begin(), mask.end(), 1);
        return mask;
    }
    std::uniform_int_distribution<int> boxes(1, 3);
    const int count = boxes(gen);
    for (int b = 0; b < count; ++b) {
        std::size_t lo[3], hi[3];
        for (int a = 0; a < 3; ++a) {
            std::uniform_int_distribution<std::size_t> pick(0, shape[a] - 1);
            std::size_t x = pick(gen), y = pick(gen);
            lo[a] = std::min(x, y);
            hi[a] = std::max(x, y) + 1;
        }
        for (std::size_t d = lo[0]; d < hi[0]; ++d)
            for (std::size_t h = lo[1]; h < hi[1]; ++h)
                for (std::size_t w = lo[2]; w < hi[2]; ++w) mask[(d * shape[1] + h) * shape[2] + w] = 1;
    }
    // Sprinkle isolated voxels so surfaces are not always box-shaped.
    std::uniform_int_distribution<std::size_t> voxel(0, mask.size() - 1);
    for (int i = 0; i < 3; ++i) mask[voxel(gen)] ^= 1;
    return mask;
}

inline Shape3 random_shape(std::mt19937_64& gen, std::size_t max_side = 16) {
    std::uniform_int_distribution<std::size_t> side(1, max_side);
    return {side(gen), side(gen), side(gen)};
}

inline OrganMask as_mask(std::vector<std::uint8_t> voxels, const Shape3& shape, const Spacing& spacing) {
    OrganMask m;
    m.shape = shape;
    m.spacing = spacing;
    m.voxels = std::move(voxels);
    return m;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("mimo_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

}  // namespace mimo::oracle
