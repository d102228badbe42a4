#include "roadgraph/raster.hpp"

#include <algorithm>
#include <cmath>

#include "roadgraph/error.hpp"

namespace roadgraph {

namespace {

void checkExtent(int width, int height) {
    require(width > 0 && height > 0, ErrorCode::Shape, "raster extent must be positive");
}

int floorClamp(double v, int lo, int hi) { return std::clamp(static_cast<int>(std::floor(v)), lo, hi); }
int ceilClamp(double v, int lo, int hi) { return std::clamp(static_cast<int>(std::ceil(v)), lo, hi); }

}  // namespace

Raster rasterizeRoadMask(const RoadGraph& g, int width, int height) {
    checkExtent(width, height);
    Raster r(width, height);
    for (const Edge& e : g.edges) {
        const Point a = g.vertices[e.a];
        const Point b = g.vertices[e.b];
        const double minX = std::min(a.x, b.x) - kRoadHalfWidth;
        const double maxX = std::max(a.x, b.x) + kRoadHalfWidth;
        const double minY = std::min(a.y, b.y) - kRoadHalfWidth;
        const double maxY = std::max(a.y, b.y) + kRoadHalfWidth;
        if (maxX < 0 || maxY < 0 || minX > width - 1 || minY > height - 1) continue;
        const int x0 = ceilClamp(minX, 0, width - 1);
        const int x1 = floorClamp(maxX, 0, width - 1);
        const int y0 = ceilClamp(minY, 0, height - 1);
        const int y1 = floorClamp(maxY, 0, height - 1);
        for (int y = y0; y <= y1; ++y) {
            for (int x = x0; x <= x1; ++x) {
                if (pointSegmentDistance({double(x), double(y)}, a, b) <= kRoadHalfWidth) r.at(x, y) = 1.0f;
            }
        }
    }
    return r;
}

Raster rasterizeIntersectionMask(const RoadGraph& g, int width, int height) {
    checkExtent(width, height);
    Raster r(width, height);
    const auto deg = g.degrees();
    const double r2 = kIntersectionRadius * kIntersectionRadius;
    for (std::size_t i = 0; i < g.vertices.size(); ++i) {
        if (deg[i] == 2) continue;
        const Point c = g.vertices[i];
        const int x0 = ceilClamp(c.x - kIntersectionRadius, 0, width - 1);
        const int x1 = floorClamp(c.x + kIntersectionRadius, 0, width - 1);
        const int y0 = ceilClamp(c.y - kIntersectionRadius, 0, height - 1);
        const int y1 = floorClamp(c.y + kIntersectionRadius, 0, height - 1);
        if (c.x + kIntersectionRadius < 0 || c.y + kIntersectionRadius < 0 || c.x - kIntersectionRadius > width - 1 ||
            c.y - kIntersectionRadius > height - 1)
            continue;
        for (int y = y0; y <= y1; ++y) {
            for (int x = x0; x <= x1; ++x) {
                if (distanceSquared({double(x), double(y)}, c) <= r2) r.at(x, y) = 1.0f;
            }
        }
    }
    return r;
}

ProbMask rasterizeLabels(const RoadGraph& g, int width, int height) {
    const Raster road = rasterizeRoadMask(g, width, height);
    const Raster inter = rasterizeIntersectionMask(g, width, height);
    ProbMask m(width, height);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            m.at(x, y, ProbMask::kRoad) = road.at(x, y);
            m.at(x, y, ProbMask::kIntersection) = inter.at(x, y);
        }
    }
    return m;
}

FusionAccumulator::FusionAccumulator(int width, int height) : width_(width), height_(height) {
    checkExtent(width, height);
    sum_.assign(static_cast<std::size_t>(width) * height * 2, 0.0);
    count_.assign(static_cast<std::size_t>(width) * height, 0);
}

void FusionAccumulator::accumulateWindow(int originX, int originY, const ProbMask& mask, int rowBegin, int rowEnd) {
    require(originX >= 0 && originY >= 0 && originX + mask.width() <= width_ && originY + mask.height() <= height_,
            ErrorCode::Contract, "window at (" + std::to_string(originX) + ", " + std::to_string(originY) +
                                     ") leaves the fusion extent");
    if (rowEnd < 0) rowEnd = height_;
    const int y0 = std::max(originY, rowBegin);
    const int y1 = std::min(originY + mask.height(), rowEnd);
    const auto src = mask.data();
    for (int gy = y0; gy < y1; ++gy) {
        const int ly = gy - originY;
        const std::size_t dst = static_cast<std::size_t>(gy) * width_ + originX;
        const std::size_t srcRow = static_cast<std::size_t>(ly) * mask.width();
        for (int lx = 0; lx < mask.width(); ++lx) {
            sum_[(dst + lx) * 2] += src[(srcRow + lx) * 2];
            sum_[(dst + lx) * 2 + 1] += src[(srcRow + lx) * 2 + 1];
            ++count_[dst + lx];
        }
    }
}

void FusionAccumulator::merge(const FusionAccumulator& other) {
    require(other.width_ == width_ && other.height_ == height_, ErrorCode::Shape,
            "cannot merge accumulators of different extent");
    for (std::size_t i = 0; i < sum_.size(); ++i) sum_[i] += other.sum_[i];
    for (std::size_t i = 0; i < count_.size(); ++i) count_[i] += other.count_[i];
}

float FusionAccumulator::fused(int x, int y, int channel) const {
    const std::size_t i = static_cast<std::size_t>(y) * width_ + x;
    if (count_[i] == 0) return 0.0f;
    const double v = sum_[i * 2 + channel] / count_[i];
    return static_cast<float>(std::clamp(v, 0.0, 1.0));
}

ProbMask FusionAccumulator::finalize() const {
    ProbMask out(width_, height_);
    for (int y = 0; y < height_; ++y) {
        for (int x = 0; x < width_; ++x) {
            out.at(x, y, 0) = fused(x, y, 0);
            out.at(x, y, 1) = fused(x, y, 1);
        }
    }
    return out;
}

}  // namespace roadgraph
