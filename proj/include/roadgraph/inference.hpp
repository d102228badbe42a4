#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <utility>
#include <vector>

#include "roadgraph/config.hpp"
#include "roadgraph/graph.hpp"
#include "roadgraph/tensor.hpp"
#include "roadgraph/toponet.hpp"

namespace roadgraph {

/// Throws Error(Contract) when a count is < 1 or the window exceeds the image.
WindowGrid planWindows(int imageWidth, int imageHeight, int windowSize, int countX, int countY);

/// True when neighbouring windows overlap by at least `radius` pixels on both
/// axes, so every pair within `radius` is co-observed by some window.
bool windowOverlapCovers(const WindowGrid& grid, double radius);

/// Per unordered vertex pair: running probability sum and observation count.
class ScoredEdgeAccumulator {
public:
    struct Entry {
        double sum{0.0};
        std::uint32_t count{0};
    };
    using Key = std::pair<std::size_t, std::size_t>;

    void add(std::size_t a, std::size_t b, double probability);
    void merge(const ScoredEdgeAccumulator& other);

    std::size_t size() const { return entries_.size(); }
    const std::map<Key, Entry>& entries() const { return entries_; }

    /// Mean probability of the pair, or -1 when it was never observed.
    double mean(std::size_t a, std::size_t b) const;

    /// Pairs whose mean is >= threshold, in ascending key order.
    std::vector<Edge> edgesAbove(double threshold) const;

private:
    std::map<Key, Entry> entries_;
};

/// Per-window inputs. Both callbacks are invoked with (ix, iy) and may be
/// called concurrently for different windows.
struct WindowSource {
    std::function<ProbMask(int, int)> mask;
    std::function<FeatureMap(int, int)> features;
};

/// Keyed store of per-window feature maps: the provider is hit at most once
/// per window. Safe for concurrent use.
class FeatureCache {
public:
    explicit FeatureCache(std::function<FeatureMap(int, int)> provider) : provider_(std::move(provider)) {}

    const FeatureMap& get(int ix, int iy);
    std::size_t loads() const;

private:
    struct Slot {
        std::once_flag once;
        FeatureMap map;
    };

    std::function<FeatureMap(int, int)> provider_;
    mutable std::mutex mutex_;
    std::map<std::pair<int, int>, std::unique_ptr<Slot>> slots_;
    std::size_t loads_{0};
};

struct InferenceStats {
    std::size_t vertices{0};
    std::size_t queries{0};        // (window, source) forward passes
    std::size_t scoredPairs{0};
    std::size_t featureLoads{0};
};

struct InferenceResult {
    RoadGraph graph;
    ScoredEdgeAccumulator scores;
    ProbMask fusedMask;
    InferenceStats stats;
};

/// Two-pass sliding-window inference. Pass 1 fuses all window masks and
/// extracts global vertices; pass 2 queries the topology decoder per window
/// and averages each pair's probability over all windows that scored it.
/// Output is identical for any thread count. A provider failure is rethrown
/// naming the window.
InferenceResult inferGraph(const WindowGrid& grid, const WindowSource& source, const TopoNetParams& params,
                           const ExtractionConfig& cfg, int threads = 1, FeatureCache* cache = nullptr);

struct ThresholdPoint {
    double threshold{0.0};
    double precision{0.0};
    double recall{0.0};
    double f1{0.0};
};

struct ThresholdSweep {
    double best{0.0};
    std::vector<ThresholdPoint> curve;  // one per candidate, in input order
};

/// Score >= threshold counts as a positive prediction. Ties in F1 resolve to
/// the smallest threshold. Throws Error(Contract) when no label is positive.
ThresholdSweep sweepThreshold(std::span<const double> scores, std::span<const std::uint8_t> labels,
                              std::span<const double> candidates);

}  // namespace roadgraph
