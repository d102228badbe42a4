#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "roadgraph/config.hpp"
#include "roadgraph/graph.hpp"
#include "roadgraph/tensor.hpp"

namespace roadgraph {

struct ScoredPoint {
    double x{0.0};
    double y{0.0};
    double score{0.0};
};

/// Greedy suppression: points are visited by descending score (ties by
/// ascending y, then x) and a point is dropped when it lies strictly within
/// `radius` of an already kept point. Returns indices into `points` in
/// traversal order.
std::vector<std::size_t> nmsIndices(std::span<const ScoredPoint> points, double radius);

std::vector<Point> nmsPoints(std::span<const ScoredPoint> points, double radius);

/// Score added to intersection candidates so they outrank every road vertex
/// when both sets are joined.
inline constexpr double kIntersectionPriority = 2.0;

/// Road and intersection channels are thresholded and suppressed separately,
/// joined with intersection priority, then suppressed again. Vertices land on
/// pixel centers; the returned graph has no edges.
RoadGraph extractVertices(const ProbMask& mask, const ExtractionConfig& cfg);

}  // namespace roadgraph
