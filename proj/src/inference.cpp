#include "roadgraph/inference.hpp"

#include <algorithm>
#include <exception>
#include <string>

#include "roadgraph/error.hpp"
#include "roadgraph/nms.hpp"
#include "roadgraph/parallel.hpp"
#include "roadgraph/raster.hpp"

namespace roadgraph {

WindowGrid planWindows(int imageWidth, int imageHeight, int windowSize, int countX, int countY) {
    require(countX >= 1 && countY >= 1, ErrorCode::Contract, "window counts must be >= 1");
    require(windowSize >= 1, ErrorCode::Contract, "window size must be positive");
    require(windowSize <= imageWidth && windowSize <= imageHeight, ErrorCode::Contract,
            "window size " + std::to_string(windowSize) + " exceeds the image extent");
    return WindowGrid{imageWidth, imageHeight, windowSize, countX, countY};
}

bool windowOverlapCovers(const WindowGrid& grid, double radius) {
    auto axisOk = [&](int count, auto origin) {
        for (int k = 1; k < count; ++k) {
            const int overlap = origin(k - 1) + grid.windowSize - origin(k);
            if (overlap < radius) return false;
        }
        return true;
    };
    return axisOk(grid.countX, [&](int k) { return grid.originX(k); }) &&
           axisOk(grid.countY, [&](int k) { return grid.originY(k); });
}

// ---------------------------------------------------------------------------

void ScoredEdgeAccumulator::add(std::size_t a, std::size_t b, double probability) {
    require(a != b, ErrorCode::Contract, "edge score for a self pair");
    Entry& e = entries_[{std::min(a, b), std::max(a, b)}];
    e.sum += probability;
    e.count += 1;
}

void ScoredEdgeAccumulator::merge(const ScoredEdgeAccumulator& other) {
    for (const auto& [key, entry] : other.entries_) {
        Entry& e = entries_[key];
        e.sum += entry.sum;
        e.count += entry.count;
    }
}

double ScoredEdgeAccumulator::mean(std::size_t a, std::size_t b) const {
    const auto it = entries_.find({std::min(a, b), std::max(a, b)});
    if (it == entries_.end()) return -1.0;
    return it->second.sum / it->second.count;
}

std::vector<Edge> ScoredEdgeAccumulator::edgesAbove(double threshold) const {
    std::vector<Edge> out;
    for (const auto& [key, entry] : entries_) {
        if (entry.sum / entry.count >= threshold) out.push_back({key.first, key.second});
    }
    return out;
}

// ---------------------------------------------------------------------------

const FeatureMap& FeatureCache::get(int ix, int iy) {
    Slot* slot = nullptr;
    {
        std::lock_guard lock(mutex_);
        auto& entry = slots_[{ix, iy}];
        if (!entry) entry = std::make_unique<Slot>();
        slot = entry.get();
    }
    std::call_once(slot->once, [&] {
        slot->map = provider_(ix, iy);
        std::lock_guard lock(mutex_);
        ++loads_;
    });
    return slot->map;
}

std::size_t FeatureCache::loads() const {
    std::lock_guard lock(mutex_);
    return loads_;
}

// ---------------------------------------------------------------------------

namespace {

std::string windowName(int ix, int iy) {
    return "window (" + std::to_string(ix) + ", " + std::to_string(iy) + ")";
}

template <typename F>
auto callProvider(int ix, int iy, const char* what, F&& f) {
    try {
        return f();
    } catch (const Error& e) {
        throw Error(e.code(), windowName(ix, iy) + " " + what + ": " + e.what());
    } catch (const std::exception& e) {
        throw Error(ErrorCode::Io, windowName(ix, iy) + " " + what + ": " + e.what());
    }
}

struct PairScore {
    std::size_t a;
    std::size_t b;
    double p;
};

ProbMask fuseWindows(const WindowGrid& grid, const WindowSource& source, int threads) {
    FusionAccumulator acc(grid.imageWidth, grid.imageHeight);
    const std::size_t total = grid.windowCount();
    const std::size_t chunk = std::max<std::size_t>(1, 2 * static_cast<std::size_t>(threads));
    std::vector<ProbMask> masks;
    for (std::size_t begin = 0; begin < total; begin += chunk) {
        const std::size_t end = std::min(total, begin + chunk);
        masks.assign(end - begin, ProbMask{});
        parallelFor(end - begin, threads, [&](std::size_t i) {
            const std::size_t w = begin + i;
            const int ix = static_cast<int>(w % grid.countX);
            const int iy = static_cast<int>(w / grid.countX);
            ProbMask m = callProvider(ix, iy, "mask", [&] { return source.mask(ix, iy); });
            require(m.width() == grid.windowSize && m.height() == grid.windowSize, ErrorCode::Shape,
                    windowName(ix, iy) + " mask is " + std::to_string(m.width()) + "x" +
                        std::to_string(m.height()) + ", expected " + std::to_string(grid.windowSize));
            masks[i] = std::move(m);
        });
        // Row bands are disjoint, and each band adds windows in window order, so
        // every pixel sees the same summation order for any thread count.
        const int bands = std::max(1, std::min(threads, grid.imageHeight));
        parallelFor(static_cast<std::size_t>(bands), threads, [&](std::size_t band) {
            const int r0 = static_cast<int>(static_cast<long>(grid.imageHeight) * band / bands);
            const int r1 = static_cast<int>(static_cast<long>(grid.imageHeight) * (band + 1) / bands);
            for (std::size_t i = 0; i < masks.size(); ++i) {
                const std::size_t w = begin + i;
                const int ix = static_cast<int>(w % grid.countX);
                const int iy = static_cast<int>(w / grid.countX);
                acc.accumulateWindow(grid.originX(ix), grid.originY(iy), masks[i], r0, r1);
            }
        });
    }
    return acc.finalize();
}

}  // namespace

InferenceResult inferGraph(const WindowGrid& grid, const WindowSource& source, const TopoNetParams& params,
                           const ExtractionConfig& cfg, int threads, FeatureCache* cache) {
    cfg.validate();
    planWindows(grid.imageWidth, grid.imageHeight, grid.windowSize, grid.countX, grid.countY);
    require(static_cast<bool>(source.mask) && static_cast<bool>(source.features), ErrorCode::Contract,
            "window source needs both mask and feature providers");
    threads = resolveThreadCount(threads);

    InferenceResult result;
    result.fusedMask = fuseWindows(grid, source, threads);
    const std::vector<Point> vertices = extractVertices(result.fusedMask, cfg).vertices;
    result.graph.vertices = vertices;
    result.stats.vertices = vertices.size();

    FeatureCache localCache(source.features);
    FeatureCache& features = cache ? *cache : localCache;

    const double margin = cfg.nmsRadius;
    const std::size_t windows = grid.windowCount();
    std::vector<std::vector<PairScore>> perWindow(windows);
    std::vector<std::size_t> queries(windows, 0);
    if (!vertices.empty()) {
        parallelFor(windows, threads, [&](std::size_t w) {
            const int ix = static_cast<int>(w % grid.countX);
            const int iy = static_cast<int>(w / grid.countX);
            const double ox = grid.originX(ix);
            const double oy = grid.originY(iy);
            const double last = grid.windowSize - 1;

            std::vector<std::size_t> members;  // global indices inside the window
            std::vector<Point> local;
            for (std::size_t v = 0; v < vertices.size(); ++v) {
                const Point p = vertices[v] - Point{ox, oy};
                if (p.x >= 0.0 && p.y >= 0.0 && p.x <= last && p.y <= last) {
                    members.push_back(v);
                    local.push_back(p);
                }
            }
            if (members.size() < 2) return;

            // The margin only applies to window sides that lie inside the image.
            const double minX = ox > 0 ? margin : 0.0;
            const double minY = oy > 0 ? margin : 0.0;
            const double maxX = ox + grid.windowSize < grid.imageWidth ? last - margin : last;
            const double maxY = oy + grid.windowSize < grid.imageHeight ? last - margin : last;

            const FeatureMap* fmap = nullptr;
            for (std::size_t s = 0; s < members.size(); ++s) {
                const Point p = local[s];
                if (p.x < minX || p.x > maxX || p.y < minY || p.y > maxY) continue;
                TopoSample sample = buildSample(local, s, cfg);
                if (sample.validCount() == 0) continue;
                if (!fmap) {
                    fmap = callProvider(ix, iy, "features", [&] { return &features.get(ix, iy); });
                    require(fmap->widthCells() * fmap->scale() >= grid.windowSize &&
                                fmap->heightCells() * fmap->scale() >= grid.windowSize,
                            ErrorCode::Shape, windowName(ix, iy) + " feature map does not cover the window");
                    require(fmap->channels() == params.config.featureDim, ErrorCode::Shape,
                            windowName(ix, iy) + " feature map has " + std::to_string(fmap->channels()) +
                                " channels, parameters expect " + std::to_string(params.config.featureDim));
                }
                const std::vector<double> probs = forward(params, *fmap, local, sample);
                ++queries[w];
                for (std::size_t k = 0; k < sample.slotCount(); ++k) {
                    if (!sample.valid[k]) continue;
                    perWindow[w].push_back({members[s], members[sample.targets[k]], probs[k]});
                }
            }
        });
    }

    for (std::size_t w = 0; w < windows; ++w) {
        for (const PairScore& ps : perWindow[w]) result.scores.add(ps.a, ps.b, ps.p);
        result.stats.queries += queries[w];
    }
    result.graph.edges = result.scores.edgesAbove(cfg.edgeThreshold);
    result.stats.scoredPairs = result.scores.size();
    result.stats.featureLoads = features.loads();
    result.graph.validate();
    return result;
}

// ---------------------------------------------------------------------------

ThresholdSweep sweepThreshold(std::span<const double> scores, std::span<const std::uint8_t> labels,
                              std::span<const double> candidates) {
    require(scores.size() == labels.size(), ErrorCode::Contract, "scores and labels differ in length");
    require(!candidates.empty(), ErrorCode::Contract, "no candidate thresholds");
    const auto positives = static_cast<std::size_t>(std::count_if(labels.begin(), labels.end(), [](auto l) { return l != 0; }));
    require(positives > 0, ErrorCode::Contract, "threshold sweep needs at least one positive label");

    ThresholdSweep out;
    double bestF1 = -1.0;
    for (double t : candidates) {
        std::size_t tp = 0;
        std::size_t predicted = 0;
        for (std::size_t i = 0; i < scores.size(); ++i) {
            if (scores[i] >= t) {
                ++predicted;
                if (labels[i]) ++tp;
            }
        }
        ThresholdPoint pt;
        pt.threshold = t;
        pt.precision = predicted ? double(tp) / double(predicted) : 0.0;
        pt.recall = double(tp) / double(positives);
        pt.f1 = pt.precision + pt.recall > 0 ? 2 * pt.precision * pt.recall / (pt.precision + pt.recall) : 0.0;
        out.curve.push_back(pt);
        if (pt.f1 > bestF1 || (pt.f1 == bestF1 && t < out.best)) {
            bestF1 = pt.f1;
            out.best = t;
        }
    }
    return out;
}

}  // namespace roadgraph
