#include "roadgraph/labelgen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <queue>
#include <random>

#include "roadgraph/error.hpp"
#include "roadgraph/nms.hpp"

namespace roadgraph {

namespace {

std::uint64_t mixSeed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

RoadGraph subdivideGraph(const RoadGraph& g, double maxSegment) {
    require(maxSegment > 0.0, ErrorCode::Contract, "subdivision length must be positive");
    RoadGraph out;
    out.vertices = g.vertices;
    for (const Edge& e : g.edges) {
        const Point a = g.vertices[e.a];
        const Point b = g.vertices[e.b];
        const double len = distance(a, b);
        const auto pieces = static_cast<std::size_t>(std::max(1.0, std::ceil(len / maxSegment)));
        std::size_t prev = e.a;
        for (std::size_t k = 1; k < pieces; ++k) {
            out.vertices.push_back(lerp(a, b, static_cast<double>(k) / static_cast<double>(pieces)));
            const std::size_t cur = out.vertices.size() - 1;
            out.edges.push_back({prev, cur});
            prev = cur;
        }
        out.edges.push_back({prev, e.b});
    }
    return out;
}

EmulatedVertices emulateVertexPrediction(const RoadGraph& subdivided, const ExtractionConfig& cfg,
                                         std::uint64_t seed, EmulationOptions options) {
    std::mt19937_64 rng(mixSeed(seed, 0));
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    const auto deg = subdivided.degrees();
    std::vector<ScoredPoint> scored(subdivided.vertices.size());
    for (std::size_t i = 0; i < scored.size(); ++i) {
        const Point p = subdivided.vertices[i];
        double score = uniform(rng);
        if (options.intersectionPriority && deg[i] != 2) score += kIntersectionPriority;
        scored[i] = {p.x, p.y, score};
    }
    EmulatedVertices out;
    for (std::size_t i : nmsIndices(scored, cfg.nmsRadius)) {
        out.positions.push_back(subdivided.vertices[i]);
        out.anchors.push_back(i);
    }
    return out;
}

std::vector<std::uint8_t> connectivityLabels(const RoadGraph& subdivided, const EmulatedVertices& emulated,
                                             std::size_t source, std::span<const std::size_t> targets,
                                             double radius) {
    require(source < emulated.anchors.size() && emulated.anchors[source] < subdivided.vertices.size(),
            ErrorCode::Contract, "source vertex has no anchor on the graph");
    const std::size_t n = subdivided.vertices.size();
    std::vector<std::uint8_t> isTarget(n, 0);
    for (std::size_t t : targets) {
        require(t < emulated.anchors.size() && emulated.anchors[t] < n, ErrorCode::Contract,
                "target vertex has no anchor on the graph");
        isTarget[emulated.anchors[t]] = 1;
    }

    const Adjacency adj = buildAdjacency(subdivided);
    constexpr double kInf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(n, kInf);
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
    const std::size_t start = emulated.anchors[source];
    dist[start] = 0.0;
    queue.push({0.0, start});
    while (!queue.empty()) {
        const auto [d, v] = queue.top();
        queue.pop();
        if (d > dist[v]) continue;
        if (v != start && isTarget[v]) continue;  // reached, but never expanded through
        for (const Neighbor& nb : adj[v]) {
            const double nd = d + nb.length;
            if (nd <= radius && nd < dist[nb.vertex]) {
                dist[nb.vertex] = nd;
                queue.push({nd, nb.vertex});
            }
        }
    }

    std::vector<std::uint8_t> labels;
    labels.reserve(targets.size());
    for (std::size_t t : targets) labels.push_back(dist[emulated.anchors[t]] <= radius ? 1 : 0);
    return labels;
}

LabeledPatch makeTopoSamples(const RoadGraph& g, const Rect& extent, const ExtractionConfig& cfg,
                             std::uint64_t seed, EmulationOptions options) {
    cfg.validate();
    LabeledPatch out;
    out.subdivided = subdivideGraph(g, cfg.nmsRadius / 4.0);
    out.emulated = emulateVertexPrediction(out.subdivided, cfg, mixSeed(seed, 1), options);
    const std::vector<Point>& anchors = out.emulated.positions;
    const std::size_t n = anchors.size();

    std::mt19937_64 sourceRng(mixSeed(seed, 2));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), sourceRng);
    order.resize(std::min<std::size_t>(n, static_cast<std::size_t>(cfg.samplesPerPatch)));

    std::mt19937_64 noiseRng(mixSeed(seed, 3));
    out.inputVertices = anchors;
    if (cfg.sigmaPerturb > 0.0) {
        std::normal_distribution<double> noise(0.0, cfg.sigmaPerturb);
        for (Point& p : out.inputVertices) {
            p.x = std::clamp(p.x + noise(noiseRng), extent.minX, extent.maxX);
            p.y = std::clamp(p.y + noise(noiseRng), extent.minY, extent.maxY);
        }
    }

    out.samples.reserve(order.size());
    for (std::size_t source : order) {
        TopoSample sample = buildSample(anchors, source, cfg);
        std::vector<std::size_t> validTargets;
        for (std::size_t k = 0; k < sample.slotCount(); ++k) {
            if (sample.valid[k]) validTargets.push_back(sample.targets[k]);
        }
        const auto labels = connectivityLabels(out.subdivided, out.emulated, source, validTargets, cfg.neighborRadius);
        sample.labels.assign(sample.slotCount(), 0);
        std::size_t r = 0;
        for (std::size_t k = 0; k < sample.slotCount(); ++k) {
            if (!sample.valid[k]) continue;
            sample.labels[k] = labels[r++];
            sample.offsets[k] = out.inputVertices[sample.targets[k]] - out.inputVertices[source];
        }
        out.samples.push_back(std::move(sample));
    }
    return out;
}

void dumpSamples(const std::filesystem::path& dir, const LabeledPatch& patch) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    require(!ec, ErrorCode::Io, "cannot create " + dir.string());
    std::ofstream index(dir / "index.txt");
    require(static_cast<bool>(index), ErrorCode::Io, "cannot write " + (dir / "index.txt").string());
    index << "# sample source valid positives file\n";
    for (std::size_t s = 0; s < patch.samples.size(); ++s) {
        const TopoSample& sample = patch.samples[s];
        Tensor t;
        t.dims = {sample.slotCount(), 4};
        std::size_t positives = 0;
        for (std::size_t k = 0; k < sample.slotCount(); ++k) {
            const bool label = !sample.labels.empty() && sample.labels[k];
            positives += label ? 1 : 0;
            t.values.insert(t.values.end(),
                            {sample.offsets[k].x, sample.offsets[k].y, double(sample.valid[k]), label ? 1.0 : 0.0});
        }
        const std::string name = "sample_" + std::to_string(s) + ".rgt";
        saveTensor(dir / name, t);
        index << s << ' ' << sample.sourceIndex << ' ' << sample.validCount() << ' ' << positives << ' ' << name
              << '\n';
    }
}

}  // namespace roadgraph
