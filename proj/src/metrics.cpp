#include "roadgraph/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <queue>
#include <random>
#include <unordered_map>

#include "roadgraph/error.hpp"
#include "roadgraph/labelgen.hpp"
#include "roadgraph/parallel.hpp"

namespace roadgraph {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t streamSeed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed ^ (0xd1b54a32d192ed03ULL * (stream + 1));
    z = (z ^ (z >> 33)) * 0xff51afd7ed558ccdULL;
    z = (z ^ (z >> 33)) * 0xc4ceb9fe1a85ec53ULL;
    return z ^ (z >> 33);
}

/// A point on the graph: edge index and parameter along it (0 at edge.a).
struct Location {
    std::size_t edge{0};
    double t{0.0};
};

/// Uniform grid of edges for nearest-location queries.
class EdgeIndex {
public:
    EdgeIndex(const RoadGraph& g, double cell) : g_(g), cell_(cell) {
        for (std::size_t e = 0; e < g.edges.size(); ++e) {
            const Point a = g.vertices[g.edges[e].a];
            const Point b = g.vertices[g.edges[e].b];
            const long x0 = key(std::min(a.x, b.x)), x1 = key(std::max(a.x, b.x));
            const long y0 = key(std::min(a.y, b.y)), y1 = key(std::max(a.y, b.y));
            for (long y = y0; y <= y1; ++y) {
                for (long x = x0; x <= x1; ++x) cells_[pack(x, y)].push_back(e);
            }
        }
    }

    /// Nearest location within `radius` (ties: lowest edge index).
    std::optional<Location> nearest(Point p, double radius) const {
        std::optional<Location> best;
        double bestD = radius;
        std::size_t bestEdge = std::numeric_limits<std::size_t>::max();
        for (long y = key(p.y - radius); y <= key(p.y + radius); ++y) {
            for (long x = key(p.x - radius); x <= key(p.x + radius); ++x) {
                const auto it = cells_.find(pack(x, y));
                if (it == cells_.end()) continue;
                for (std::size_t e : it->second) {
                    const Point a = g_.vertices[g_.edges[e].a];
                    const Point b = g_.vertices[g_.edges[e].b];
                    const double t = closestSegmentParameter(p, a, b);
                    const double d = distance(p, lerp(a, b, t));
                    if (d < bestD || (d == bestD && e < bestEdge)) {
                        bestD = d;
                        bestEdge = e;
                        best = Location{e, t};
                    }
                }
            }
        }
        return best;
    }

private:
    long key(double v) const { return static_cast<long>(std::floor(v / cell_)); }
    static std::int64_t pack(long x, long y) { return (static_cast<std::int64_t>(x) << 32) ^ (y & 0xffffffffLL); }

    const RoadGraph& g_;
    double cell_;
    std::unordered_map<std::int64_t, std::vector<std::size_t>> cells_;
};

/// Dijkstra from a location, stopping at `limit`. Returns distance per vertex
/// (infinity when unreached or beyond the limit).
std::vector<double> distancesFrom(const RoadGraph& g, const Adjacency& adj, const Location& loc,
                                  double limit = kInf) {
    std::vector<double> dist(g.vertices.size(), kInf);
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
    const Edge& e = g.edges[loc.edge];
    const double len = g.edgeLength(e);
    auto seed = [&](std::size_t v, double d) {
        if (d <= limit && d < dist[v]) {
            dist[v] = d;
            queue.push({d, v});
        }
    };
    seed(e.a, loc.t * len);
    seed(e.b, (1.0 - loc.t) * len);
    while (!queue.empty()) {
        const auto [d, v] = queue.top();
        queue.pop();
        if (d > dist[v]) continue;
        for (const Neighbor& nb : adj[v]) {
            const double nd = d + nb.length;
            if (nd <= limit && nd < dist[nb.vertex]) {
                dist[nb.vertex] = nd;
                queue.push({nd, nb.vertex});
            }
        }
    }
    return dist;
}

double distanceTo(const RoadGraph& g, const std::vector<double>& dist, const Location& from, const Location& to) {
    const Edge& e = g.edges[to.edge];
    const double len = g.edgeLength(e);
    double best = std::min(dist[e.a] + to.t * len, dist[e.b] + (1.0 - to.t) * len);
    if (from.edge == to.edge) best = std::min(best, std::abs(from.t - to.t) * len);
    return best;
}

Point locationPoint(const RoadGraph& g, const Location& loc) {
    return lerp(g.vertices[g.edges[loc.edge].a], g.vertices[g.edges[loc.edge].b], loc.t);
}

/// Arc-length uniform locations.
std::vector<Location> sampleLocations(const RoadGraph& g, int count, std::uint64_t seed) {
    std::vector<double> cumulative;
    double total = 0.0;
    for (const Edge& e : g.edges) {
        total += g.edgeLength(e);
        cumulative.push_back(total);
    }
    std::vector<Location> out;
    if (total <= 0.0) return out;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uniform(0.0, total);
    for (int i = 0; i < count; ++i) {
        const double u = uniform(rng);
        std::size_t e = static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), u) -
                                                 cumulative.begin());
        e = std::min(e, g.edges.size() - 1);
        // Skip zero-length edges, which carry no arc length.
        while (g.edgeLength(g.edges[e]) <= 0.0 && e + 1 < g.edges.size()) ++e;
        const double start = cumulative[e] - g.edgeLength(g.edges[e]);
        const double len = g.edgeLength(g.edges[e]);
        out.push_back({e, len > 0 ? std::clamp((u - start) / len, 0.0, 1.0) : 0.0});
    }
    return out;
}

struct Densified {
    RoadGraph graph;
    Adjacency adj;
    EdgeIndex index;

    Densified(const RoadGraph& g, double interval)
        : graph(subdivideGraph(g, interval)), adj(buildAdjacency(graph)), index(graph, 16.0) {}
};

/// Greedy nearest-first one-to-one matching; returns the number of pairs.
std::size_t greedyMatchCount(const std::vector<Point>& own, std::vector<Point> other, double radius) {
    std::sort(other.begin(), other.end(), [](Point a, Point b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
    struct Pair {
        double d;
        std::size_t i;
        std::size_t j;
    };
    std::vector<Pair> pairs;
    for (std::size_t i = 0; i < own.size(); ++i) {
        const Point p = own[i];
        auto it = std::lower_bound(other.begin(), other.end(), p.x - radius, [](Point q, double x) { return q.x < x; });
        for (; it != other.end() && it->x <= p.x + radius; ++it) {
            const double d = distance(p, *it);
            if (d <= radius) pairs.push_back({d, i, static_cast<std::size_t>(it - other.begin())});
        }
    }
    std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
        if (a.d != b.d) return a.d < b.d;
        if (a.i != b.i) return a.i < b.i;
        return a.j < b.j;
    });
    std::vector<char> usedOwn(own.size(), 0), usedOther(other.size(), 0);
    std::size_t matched = 0;
    for (const Pair& p : pairs) {
        if (usedOwn[p.i] || usedOther[p.j]) continue;
        usedOwn[p.i] = usedOther[p.j] = 1;
        ++matched;
    }
    return matched;
}

std::vector<Point> reachableSamples(const Densified& d, const Location& loc, double radius) {
    const auto dist = distancesFrom(d.graph, d.adj, loc, radius);
    std::vector<Point> out;
    for (std::size_t v = 0; v < dist.size(); ++v) {
        if (dist[v] <= radius) out.push_back(d.graph.vertices[v]);
    }
    return out;
}

struct Counts {
    std::uint64_t matched{0};
    std::uint64_t total{0};
};

/// Samples reachable from seeds on `own`, matched against the samples
/// reachable from the corresponding location on `other`.
Counts seedCounts(const Densified& own, const Densified* other, const std::vector<Location>& seeds,
                  const TopoParams& params) {
    std::vector<Counts> perSeed(seeds.size());
    parallelFor(seeds.size(), params.threads, [&](std::size_t s) {
        const auto mine = reachableSamples(own, seeds[s], params.propagationRadius);
        perSeed[s].total = mine.size();
        if (!other) return;
        const auto hit = other->index.nearest(locationPoint(own.graph, seeds[s]), params.matchRadius);
        if (!hit) return;
        const auto theirs = reachableSamples(*other, *hit, params.propagationRadius);
        perSeed[s].matched = greedyMatchCount(mine, theirs, params.matchRadius);
    });
    Counts total;
    for (const Counts& c : perSeed) {
        total.matched += c.matched;
        total.total += c.total;
    }
    return total;
}

}  // namespace

TopoScore toposcore(const RoadGraph& gt, const RoadGraph& pred, const TopoParams& params) {
    gt.validate();
    pred.validate();
    require(params.matchRadius > 0 && params.propagationRadius > 0 && params.sampleInterval > 0 &&
                params.seedCount > 0,
            ErrorCode::Contract, "TOPO parameters must be positive");
    require(gt.totalLength() > 0.0, ErrorCode::Contract, "ground-truth graph has no edges");

    const Densified g(gt, params.sampleInterval);
    TopoScore out;
    const auto gtSeeds = sampleLocations(g.graph, params.seedCount, streamSeed(params.seed, 0));
    if (pred.totalLength() <= 0.0) {
        out.totalHoles = seedCounts(g, nullptr, gtSeeds, params).total;
        return out;
    }
    const Densified p(pred, params.sampleInterval);
    const Counts holes = seedCounts(g, &p, gtSeeds, params);
    const auto predSeeds = sampleLocations(p.graph, params.seedCount, streamSeed(params.seed, 1));
    const Counts marbles = seedCounts(p, &g, predSeeds, params);

    out.matchedHoles = holes.matched;
    out.totalHoles = holes.total;
    out.matchedMarbles = marbles.matched;
    out.totalMarbles = marbles.total;
    out.recall = holes.total ? double(holes.matched) / double(holes.total) : 0.0;
    out.precision = marbles.total ? double(marbles.matched) / double(marbles.total) : 0.0;
    out.f1 = out.precision + out.recall > 0 ? 2 * out.precision * out.recall / (out.precision + out.recall) : 0.0;
    return out;
}

// ---------------------------------------------------------------------------

double aplsPairScore(double lengthGt, double lengthPred) {
    require(lengthGt > 0.0, ErrorCode::Contract, "APLS pair needs a positive reference length");
    return 1.0 - std::min(1.0, std::abs(lengthGt - lengthPred) / lengthGt);
}

namespace {

struct VertexPair {
    std::size_t u;
    std::size_t v;
};

/// Uniform vertex pairs restricted to distinct, connected, non-coincident
/// vertices. Empty when the graph has no such pair.
std::vector<VertexPair> samplePairs(const RoadGraph& g, int count, std::uint64_t seed) {
    std::vector<VertexPair> out;
    const std::size_t n = g.vertices.size();
    if (n < 2) return out;
    const auto comp = connectedComponents(g);
    bool any = false;
    {
        // Does some component hold two vertices at different positions?
        std::unordered_map<std::size_t, Point> first;
        for (std::size_t v = 0; v < n && !any; ++v) {
            auto [it, inserted] = first.try_emplace(comp[v], g.vertices[v]);
            if (!inserted && !(it->second == g.vertices[v])) any = true;
        }
    }
    if (!any) return out;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    const long maxAttempts = 1000L * count + 100000L;
    for (long attempt = 0; attempt < maxAttempts && static_cast<int>(out.size()) < count; ++attempt) {
        const std::size_t u = pick(rng);
        const std::size_t v = pick(rng);
        if (u == v || comp[u] != comp[v] || g.vertices[u] == g.vertices[v]) continue;
        out.push_back({u, v});
    }
    return out;
}

double directional(const RoadGraph& a, const RoadGraph& b, const std::vector<VertexPair>& pairs,
                   const AplsParams& params) {
    if (pairs.empty()) return 0.0;
    const Adjacency adjA = buildAdjacency(a);
    const Adjacency adjB = buildAdjacency(b);
    const EdgeIndex indexB(b, 16.0);

    std::vector<std::size_t> order(pairs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return pairs[x].u < pairs[y].u; });
    std::vector<std::pair<std::size_t, std::size_t>> groups;  // [begin, end) in order
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j < order.size() && pairs[order[j]].u == pairs[order[i]].u) ++j;
        groups.push_back({i, j});
        i = j;
    }

    std::vector<double> scores(pairs.size(), 0.0);
    parallelFor(groups.size(), params.threads, [&](std::size_t gi) {
        const auto [begin, end] = groups[gi];
        const std::size_t u = pairs[order[begin]].u;
        // Dijkstra in `a` from vertex u: a location at the vertex itself.
        std::vector<double> distA(a.vertices.size(), kInf);
        {
            using Item = std::pair<double, std::size_t>;
            std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
            distA[u] = 0.0;
            queue.push({0.0, u});
            while (!queue.empty()) {
                const auto [d, v] = queue.top();
                queue.pop();
                if (d > distA[v]) continue;
                for (const Neighbor& nb : adjA[v]) {
                    if (d + nb.length < distA[nb.vertex]) {
                        distA[nb.vertex] = d + nb.length;
                        queue.push({distA[nb.vertex], nb.vertex});
                    }
                }
            }
        }
        const auto snapU = b.edges.empty() ? std::nullopt : indexB.nearest(a.vertices[u], params.snapRadius);
        std::vector<double> distB;
        if (snapU) distB = distancesFrom(b, adjB, *snapU);
        for (std::size_t k = begin; k < end; ++k) {
            const std::size_t pi = order[k];
            const double la = distA[pairs[pi].v];
            if (!snapU || !std::isfinite(la) || la <= 0.0) continue;
            const auto snapV = indexB.nearest(a.vertices[pairs[pi].v], params.snapRadius);
            if (!snapV) continue;
            const double lb = distanceTo(b, distB, *snapU, *snapV);
            if (!std::isfinite(lb)) continue;
            scores[pi] = aplsPairScore(la, lb);
        }
    });
    double sum = 0.0;
    for (double s : scores) sum += s;
    return sum / static_cast<double>(pairs.size());
}

}  // namespace

AplsScore apls(const RoadGraph& gt, const RoadGraph& pred, const AplsParams& params) {
    gt.validate();
    pred.validate();
    require(params.snapRadius > 0 && params.pairCount > 0, ErrorCode::Contract, "APLS parameters must be positive");
    const auto gtPairs = samplePairs(gt, params.pairCount, streamSeed(params.seed, 2));
    require(!gtPairs.empty(), ErrorCode::Contract, "ground-truth graph has no connected vertex pair");
    const auto predPairs = samplePairs(pred, params.pairCount, streamSeed(params.seed, 3));

    AplsScore out;
    out.pairs = static_cast<int>(gtPairs.size());
    out.gtToPred = directional(gt, pred, gtPairs, params);
    out.predToGt = directional(pred, gt, predPairs, params);
    out.apls = 0.5 * (out.gtToPred + out.predToGt);
    return out;
}

}  // namespace roadgraph
