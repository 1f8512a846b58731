#include "mimo/kdtree.hpp"

#include <algorithm>
#include <limits>

#include "mimo/error.hpp"

namespace mimo {
namespace {
constexpr std::uint32_t kLeafSize = 8;
}

PointIndex::PointIndex(std::span<const Point3> points) : points_(points.begin(), points.end()) {
    if (points_.size() >= std::numeric_limits<std::uint32_t>::max()) throw Error("point set too large to index");
    if (!points_.empty()) {
        nodes_.reserve(2 * (points_.size() / kLeafSize) + 2);
        build(0, static_cast<std::uint32_t>(points_.size()), 0);
    }
}

std::uint32_t PointIndex::build(std::uint32_t begin, std::uint32_t end, int depth) {
    const auto index = static_cast<std::uint32_t>(nodes_.size());
    nodes_.push_back(Node{begin, end, 0, 0, 0, 0.0});
    if (end - begin <= kLeafSize) return index;

    Point3 lo = points_[begin], hi = points_[begin];
    for (std::uint32_t i = begin + 1; i < end; ++i)
        for (int a = 0; a < 3; ++a) {
            lo[a] = std::min(lo[a], points_[i][a]);
            hi[a] = std::max(hi[a], points_[i][a]);
        }
    int axis = 0;
    for (int a = 1; a < 3; ++a)
        if (hi[a] - lo[a] > hi[axis] - lo[axis]) axis = a;
    if (hi[axis] == lo[axis]) return index;  // all points coincide

    const std::uint32_t mid = begin + (end - begin) / 2;
    std::nth_element(points_.begin() + begin, points_.begin() + mid, points_.begin() + end,
                     [axis](const Point3& a, const Point3& b) { return a[axis] < b[axis]; });
    const double split = points_[mid][axis];
    const std::uint32_t left = build(begin, mid, depth + 1);
    const std::uint32_t right = build(mid, end, depth + 1);
    nodes_[index].left = left;
    nodes_[index].right = right;
    nodes_[index].axis = static_cast<std::uint8_t>(axis);
    nodes_[index].split = split;
    return index;
}

double PointIndex::nearest_squared(const Point3& query, double good_enough) const {
    double best = std::numeric_limits<double>::infinity();
    if (nodes_.empty()) return best;

    // Explicit stack; depth is logarithmic so a small fixed array suffices.
    struct Pending {
        std::uint32_t node;
        double plane_gap;  // squared distance to the splitting plane
    };
    Pending stack[128];
    int top = 0;
    stack[top++] = {0, 0.0};
    while (top > 0) {
        const Pending item = stack[--top];
        if (item.plane_gap >= best) continue;
        const Node& node = nodes_[item.node];
        if (node.left == 0) {
            for (std::uint32_t i = node.begin; i < node.end; ++i) {
                const double d2 = squared_distance(query, points_[i]);
                if (d2 < best) best = d2;
            }
            if (best <= good_enough) return best;
            continue;
        }
        const double diff = query[node.axis] - node.split;
        const double gap = diff * diff;
        const std::uint32_t near = diff <= 0.0 ? node.left : node.right;
        const std::uint32_t far = diff <= 0.0 ? node.right : node.left;
        // Far side first on the stack so the near side is explored first.
        stack[top++] = {far, std::max(gap, item.plane_gap)};
        stack[top++] = {near, item.plane_gap};
    }
    return best;
}

}  // namespace mimo
