#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mimo/metrics.hpp"

namespace mimo {

// Static 3-d tree for exact nearest-neighbour queries on squared Euclidean
// distance. Points are copied and reordered in place; nodes are implicit
// (median split over index ranges).
class PointIndex {
public:
    explicit PointIndex(std::span<const Point3> points);

    std::size_t size() const { return points_.size(); }

    /// Exact minimum squared distance from `query` to the indexed points.
    /// Once a candidate at or below `good_enough` is found the search may stop
    /// early and return that candidate's distance instead of the true minimum.
    double nearest_squared(const Point3& query, double good_enough = -1.0) const;

private:
    struct Node {
        std::uint32_t begin = 0;
        std::uint32_t end = 0;
        std::uint32_t left = 0;   // 0 = leaf
        std::uint32_t right = 0;
        std::uint8_t axis = 0;
        double split = 0.0;
    };

    std::uint32_t build(std::uint32_t begin, std::uint32_t end, int depth);

    std::vector<Point3> points_;
    std::vector<Node> nodes_;
};

inline double squared_distance(const Point3& a, const Point3& b) {
    const double dx = a[0] - b[0];
    const double dy = a[1] - b[1];
    const double dz = a[2] - b[2];
    return dx * dx + dy * dy + dz * dz;
}

}  // namespace mimo
