#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "roadgraph/graph.hpp"
#include "roadgraph/tensor.hpp"

namespace roadgraph {

/// Single-channel raster; label rasters hold 0.0 / 1.0.
struct Raster {
    int width{0};
    int height{0};
    std::vector<float> data;

    Raster() = default;
    Raster(int w, int h) : width(w), height(h), data(static_cast<std::size_t>(w) * h, 0.0f) {}

    float at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
    float& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }

    friend bool operator==(const Raster&, const Raster&) = default;
};

inline constexpr double kRoadHalfWidth = 1.5;       // 3 px stroke
inline constexpr double kIntersectionRadius = 3.0;

/// Pixel = 1 iff its center lies within 1.5 px of some edge segment.
Raster rasterizeRoadMask(const RoadGraph& g, int width, int height);

/// Pixel = 1 iff its center lies within 3 px of a vertex whose degree != 2.
Raster rasterizeIntersectionMask(const RoadGraph& g, int width, int height);

/// Both label rasters packed as a ProbMask (road, intersection).
ProbMask rasterizeLabels(const RoadGraph& g, int width, int height);

/// Running per-pixel sum and observation count of window masks.
class FusionAccumulator {
public:
    FusionAccumulator(int width, int height);

    int width() const { return width_; }
    int height() const { return height_; }

    /// Adds `mask` placed with its top-left pixel at (originX, originY). Only
    /// global rows in [rowBegin, rowEnd) are touched, which lets disjoint row
    /// bands be filled concurrently. Throws Error(Contract) if the window
    /// leaves the accumulator.
    void accumulateWindow(int originX, int originY, const ProbMask& mask, int rowBegin = 0,
                          int rowEnd = -1);

    /// Elementwise sum of sums and counts.
    void merge(const FusionAccumulator& other);

    std::uint32_t count(int x, int y) const { return count_[static_cast<std::size_t>(y) * width_ + x]; }

    /// sum / count where observed, 0 elsewhere.
    float fused(int x, int y, int channel) const;

    ProbMask finalize() const;

private:
    int width_;
    int height_;
    std::vector<double> sum_;
    std::vector<std::uint32_t> count_;
};

inline ProbMask finalizeFusion(const FusionAccumulator& acc) { return acc.finalize(); }

}  // namespace roadgraph
