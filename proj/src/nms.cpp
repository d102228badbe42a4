#include "roadgraph/nms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "roadgraph/error.hpp"

namespace roadgraph {

namespace {

/// Uniform bucket grid over kept points with cell size = radius, so any point
/// closer than the radius lives in one of the 3x3 neighboring cells.
class KeptGrid {
public:
    explicit KeptGrid(double cell) : cell_(cell) {}

    bool anyWithin(double x, double y, double radius) const {
        const auto [cx, cy] = cellOf(x, y);
        const double r2 = radius * radius;
        for (std::int64_t dy = -1; dy <= 1; ++dy) {
            for (std::int64_t dx = -1; dx <= 1; ++dx) {
                auto it = cells_.find(key(cx + dx, cy + dy));
                if (it == cells_.end()) continue;
                for (const Point& p : it->second) {
                    const double ddx = p.x - x;
                    const double ddy = p.y - y;
                    if (ddx * ddx + ddy * ddy < r2) return true;
                }
            }
        }
        return false;
    }

    void insert(double x, double y) {
        const auto [cx, cy] = cellOf(x, y);
        cells_[key(cx, cy)].push_back({x, y});
    }

private:
    std::pair<std::int64_t, std::int64_t> cellOf(double x, double y) const {
        return {static_cast<std::int64_t>(std::floor(x / cell_)), static_cast<std::int64_t>(std::floor(y / cell_))};
    }
    static std::uint64_t key(std::int64_t cx, std::int64_t cy) {
        return (static_cast<std::uint64_t>(cx) << 32) ^ (static_cast<std::uint64_t>(cy) & 0xffffffffULL);
    }

    double cell_;
    std::unordered_map<std::uint64_t, std::vector<Point>> cells_;
};

}  // namespace

std::vector<std::size_t> nmsIndices(std::span<const ScoredPoint> points, double radius) {
    require(radius > 0.0, ErrorCode::Contract, "NMS radius must be positive");
    std::vector<std::size_t> order(points.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        const ScoredPoint& a = points[i];
        const ScoredPoint& b = points[j];
        if (a.score != b.score) return a.score > b.score;
        if (a.y != b.y) return a.y < b.y;
        if (a.x != b.x) return a.x < b.x;
        return i < j;
    });

    KeptGrid grid(radius);
    std::vector<std::size_t> kept;
    for (std::size_t i : order) {
        const ScoredPoint& p = points[i];
        require(std::isfinite(p.score), ErrorCode::Contract, "NMS scores must be finite");
        if (grid.anyWithin(p.x, p.y, radius)) continue;
        grid.insert(p.x, p.y);
        kept.push_back(i);
    }
    return kept;
}

std::vector<Point> nmsPoints(std::span<const ScoredPoint> points, double radius) {
    std::vector<Point> out;
    for (std::size_t i : nmsIndices(points, radius)) out.push_back({points[i].x, points[i].y});
    return out;
}

namespace {

std::vector<ScoredPoint> candidates(const ProbMask& mask, int channel, double threshold) {
    std::vector<ScoredPoint> out;
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            const float v = mask.at(x, y, channel);
            if (v > threshold) out.push_back({double(x), double(y), double(v)});
        }
    }
    return out;
}

}  // namespace

RoadGraph extractVertices(const ProbMask& mask, const ExtractionConfig& cfg) {
    cfg.validate();
    const auto road = candidates(mask, ProbMask::kRoad, cfg.threshold);
    const auto inter = candidates(mask, ProbMask::kIntersection, cfg.threshold);

    std::vector<ScoredPoint> joined;
    for (std::size_t i : nmsIndices(road, cfg.nmsRadius)) joined.push_back(road[i]);
    for (std::size_t i : nmsIndices(inter, cfg.nmsRadius)) {
        ScoredPoint p = inter[i];
        p.score += kIntersectionPriority;
        joined.push_back(p);
    }

    RoadGraph g;
    g.vertices = nmsPoints(joined, cfg.nmsRadius);
    return g;
}

}  // namespace roadgraph
