#include "roadgraph/synth.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <random>
#include <unordered_map>

#include "roadgraph/error.hpp"
#include "roadgraph/raster.hpp"

namespace roadgraph {

SceneStyle parseSceneStyle(const std::string& name) {
    if (name == "grid") return SceneStyle::Grid;
    if (name == "radial") return SceneStyle::Radial;
    if (name == "mixed") return SceneStyle::Mixed;
    fail(ErrorCode::Usage, "unknown scene style '" + name + "' (grid, radial, mixed)");
}

std::string sceneStyleName(SceneStyle style) {
    switch (style) {
        case SceneStyle::Grid: return "grid";
        case SceneStyle::Radial: return "radial";
        case SceneStyle::Mixed: return "mixed";
    }
    return "grid";
}

namespace {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

/// Street coordinates along one axis; the first and last lie outside the image.
std::vector<double> streetPositions(int extent, double density, Rng& rng) {
    std::vector<double> out;
    double x = -uniform(rng, 8.0, 64.0) / density;
    out.push_back(x);
    while (x <= extent - 1) {
        x += uniform(rng, 64.0, 128.0) / density;
        out.push_back(x);
    }
    return out;
}

bool connectedWithout(const RoadGraph& g, const std::vector<char>& removed, std::size_t skip) {
    std::vector<std::vector<std::size_t>> adj(g.vertices.size());
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
        if (removed[e] || e == skip) continue;
        adj[g.edges[e].a].push_back(g.edges[e].b);
        adj[g.edges[e].b].push_back(g.edges[e].a);
    }
    const std::size_t from = g.edges[skip].a;
    const std::size_t to = g.edges[skip].b;
    std::vector<char> seen(g.vertices.size(), 0);
    std::vector<std::size_t> stack{from};
    seen[from] = 1;
    while (!stack.empty()) {
        const std::size_t v = stack.back();
        stack.pop_back();
        if (v == to) return true;
        for (std::size_t w : adj[v]) {
            if (!seen[w]) {
                seen[w] = 1;
                stack.push_back(w);
            }
        }
    }
    return false;
}

RoadGraph gridScene(const SceneSpec& spec, Rng& rng) {
    const auto xs = streetPositions(spec.width, spec.density, rng);
    const auto ys = streetPositions(spec.height, spec.density, rng);
    const std::size_t nx = xs.size();
    const std::size_t ny = ys.size();
    RoadGraph g;
    for (std::size_t j = 0; j < ny; ++j) {
        for (std::size_t i = 0; i < nx; ++i) {
            const double jx = spec.jitter > 0 ? uniform(rng, -spec.jitter, spec.jitter) : 0.0;
            const double jy = spec.jitter > 0 ? uniform(rng, -spec.jitter, spec.jitter) : 0.0;
            g.vertices.push_back({xs[i] + jx, ys[j] + jy});
        }
    }
    auto id = [nx](std::size_t i, std::size_t j) { return j * nx + i; };
    for (std::size_t j = 0; j < ny; ++j) {
        for (std::size_t i = 0; i < nx; ++i) {
            if (i + 1 < nx) g.edges.push_back({id(i, j), id(i + 1, j)});
            if (j + 1 < ny) g.edges.push_back({id(i, j), id(i, j + 1)});
        }
    }

    if (spec.dropFraction > 0.0) {
        const Rect inside{0.0, 0.0, spec.width - 1.0, spec.height - 1.0};
        std::vector<std::size_t> interior;
        for (std::size_t e = 0; e < g.edges.size(); ++e) {
            if (inside.contains(g.vertices[g.edges[e].a]) && inside.contains(g.vertices[g.edges[e].b])) {
                interior.push_back(e);
            }
        }
        std::shuffle(interior.begin(), interior.end(), rng);
        const auto target = static_cast<std::size_t>(std::lround(spec.dropFraction * interior.size()));
        std::vector<char> removed(g.edges.size(), 0);
        std::size_t dropped = 0;
        for (std::size_t e : interior) {
            if (dropped == target) break;
            if (connectedWithout(g, removed, e)) {
                removed[e] = 1;
                ++dropped;
            }
        }
        std::vector<Edge> kept;
        for (std::size_t e = 0; e < g.edges.size(); ++e) {
            if (!removed[e]) kept.push_back(g.edges[e]);
        }
        g.edges = std::move(kept);
    }
    return g;
}

RoadGraph radialScene(const SceneSpec& spec, Rng& rng) {
    const double w = spec.width;
    const double h = spec.height;
    const Point c{w / 2 + uniform(rng, -w / 8, w / 8), h / 2 + uniform(rng, -h / 8, h / 8)};
    double maxR = 0.0;
    for (Point corner : {Point{0, 0}, Point{w - 1, 0}, Point{0, h - 1}, Point{w - 1, h - 1}}) {
        maxR = std::max(maxR, distance(c, corner));
    }

    std::vector<double> radii{uniform(rng, 48.0, 72.0)};
    while (radii.back() <= maxR) radii.push_back(radii.back() + uniform(rng, 72.0, 110.0) / spec.density);

    constexpr double kTau = 2.0 * std::numbers::pi;
    const int spokes = std::clamp(static_cast<int>(std::lround(kTau * radii[0] / 80.0)), 4, 8);
    struct Spoke {
        double angle;
        std::size_t firstRing;
    };
    std::vector<Spoke> spokeList;
    for (int s = 0; s < spokes; ++s) {
        spokeList.push_back({kTau * s / spokes + uniform(rng, -0.2, 0.2), 0});
    }

    RoadGraph g;
    // Vertex of each spoke on the previous ring.
    std::map<std::size_t, std::size_t> lastOnSpoke;
    for (std::size_t ring = 0; ring < radii.size(); ++ring) {
        const double r = radii[ring];
        // Keep the spoke spacing along the ring bounded by splitting wide gaps.
        std::vector<double> active;
        for (const Spoke& s : spokeList) active.push_back(s.angle);
        std::sort(active.begin(), active.end());
        std::vector<double> added;
        for (std::size_t k = 0; k < active.size(); ++k) {
            const double a0 = active[k];
            const double a1 = k + 1 < active.size() ? active[k + 1] : active[0] + kTau;
            if ((a1 - a0) * r > 250.0) added.push_back(std::fmod(0.5 * (a0 + a1) + uniform(rng, -0.1, 0.1), kTau));
        }
        for (double a : added) spokeList.push_back({a, ring});

        struct Mark {
            double angle;
            long spoke;  // -1 for plain ring samples
        };
        std::vector<Mark> marks;
        for (std::size_t s = 0; s < spokeList.size(); ++s) {
            double a = std::fmod(spokeList[s].angle, kTau);
            if (a < 0) a += kTau;
            marks.push_back({a, static_cast<long>(s)});
        }
        std::sort(marks.begin(), marks.end(), [](const Mark& x, const Mark& y) { return x.angle < y.angle; });
        std::vector<Mark> ringMarks;
        for (std::size_t k = 0; k < marks.size(); ++k) {
            const double a0 = marks[k].angle;
            const double a1 = k + 1 < marks.size() ? marks[k + 1].angle : marks[0].angle + kTau;
            ringMarks.push_back(marks[k]);
            const int pieces = std::max(1, static_cast<int>(std::ceil((a1 - a0) * r / 12.0)));
            for (int p = 1; p < pieces; ++p) ringMarks.push_back({a0 + (a1 - a0) * p / pieces, -1});
        }

        const std::size_t first = g.vertices.size();
        for (const Mark& m : ringMarks) {
            g.vertices.push_back({c.x + r * std::cos(m.angle), c.y + r * std::sin(m.angle)});
        }
        for (std::size_t k = 0; k < ringMarks.size(); ++k) {
            g.edges.push_back({first + k, first + (k + 1) % ringMarks.size()});
            if (ringMarks[k].spoke >= 0) {
                const auto s = static_cast<std::size_t>(ringMarks[k].spoke);
                const auto it = lastOnSpoke.find(s);
                if (it != lastOnSpoke.end()) g.edges.push_back({it->second, first + k});
                lastOnSpoke[s] = first + k;
            }
        }
    }
    return g;
}

/// Splits crossing edges at their intersection and merges vertices closer
/// than `mergeRadius`.
RoadGraph planarize(const RoadGraph& in, double mergeRadius) {
    RoadGraph g = in;
    const double cell = 32.0;
    std::unordered_map<std::int64_t, std::vector<std::size_t>> grid;
    auto key = [&](double v) { return static_cast<std::int64_t>(std::floor(v / cell)); };
    auto pack = [](std::int64_t x, std::int64_t y) { return (x << 32) ^ (y & 0xffffffffLL); };
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
        const Point a = g.vertices[g.edges[e].a];
        const Point b = g.vertices[g.edges[e].b];
        for (auto y = key(std::min(a.y, b.y)); y <= key(std::max(a.y, b.y)); ++y) {
            for (auto x = key(std::min(a.x, b.x)); x <= key(std::max(a.x, b.x)); ++x) grid[pack(x, y)].push_back(e);
        }
    }
    std::vector<std::vector<std::pair<double, std::size_t>>> splits(g.edges.size());
    std::map<std::pair<std::size_t, std::size_t>, bool> tested;
    for (auto& [k, list] : grid) {
        for (std::size_t i = 0; i < list.size(); ++i) {
            for (std::size_t j = i + 1; j < list.size(); ++j) {
                const std::size_t e = std::min(list[i], list[j]);
                const std::size_t f = std::max(list[i], list[j]);
                if (!tested.emplace(std::make_pair(e, f), true).second) continue;
                const Edge& ee = g.edges[e];
                const Edge& ff = g.edges[f];
                if (ee.a == ff.a || ee.a == ff.b || ee.b == ff.a || ee.b == ff.b) continue;
                double te = 0.0, tf = 0.0;
                const Point a = g.vertices[ee.a], b = g.vertices[ee.b];
                if (!segmentIntersection(a, b, g.vertices[ff.a], g.vertices[ff.b], te, tf)) continue;
                const std::size_t v = g.vertices.size();
                g.vertices.push_back(lerp(a, b, te));
                splits[e].push_back({te, v});
                splits[f].push_back({tf, v});
            }
        }
    }
    std::vector<Edge> edges;
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
        auto& s = splits[e];
        std::sort(s.begin(), s.end());
        std::size_t prev = g.edges[e].a;
        for (const auto& [t, v] : s) {
            edges.push_back({prev, v});
            prev = v;
        }
        edges.push_back({prev, g.edges[e].b});
    }
    g.edges = std::move(edges);

    // Union-find merge of near-coincident vertices.
    std::vector<std::size_t> parent(g.vertices.size());
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    };
    std::unordered_map<std::int64_t, std::vector<std::size_t>> vgrid;
    auto vkey = [&](double v) { return static_cast<std::int64_t>(std::floor(v / mergeRadius)); };
    for (std::size_t v = 0; v < g.vertices.size(); ++v) {
        const Point p = g.vertices[v];
        for (auto y = vkey(p.y) - 1; y <= vkey(p.y) + 1; ++y) {
            for (auto x = vkey(p.x) - 1; x <= vkey(p.x) + 1; ++x) {
                const auto it = vgrid.find(pack(x, y));
                if (it == vgrid.end()) continue;
                for (std::size_t u : it->second) {
                    if (distance(p, g.vertices[u]) <= mergeRadius) {
                        const std::size_t ru = find(u), rv = find(v);
                        if (ru != rv) parent[std::max(ru, rv)] = std::min(ru, rv);
                    }
                }
            }
        }
        vgrid[pack(vkey(p.x), vkey(p.y))].push_back(v);
    }
    for (Edge& e : g.edges) {
        e.a = find(e.a);
        e.b = find(e.b);
    }
    return cleanGraph(g, true);
}

}  // namespace

RoadGraph generateScene(const SceneSpec& spec) {
    require(spec.width >= 256 && spec.height >= 256, ErrorCode::Contract, "scene extent must be at least 256 px");
    require(spec.density > 0.0 && std::isfinite(spec.density), ErrorCode::Contract, "density must be positive");
    require(spec.jitter >= 0.0 && spec.dropFraction >= 0.0 && spec.dropFraction < 1.0, ErrorCode::Contract,
            "jitter must be >= 0 and dropFraction in [0, 1)");
    Rng rng(spec.seed);
    RoadGraph g;
    switch (spec.style) {
        case SceneStyle::Grid: g = gridScene(spec, rng); break;
        case SceneStyle::Radial: g = radialScene(spec, rng); break;
        case SceneStyle::Mixed: {
            RoadGraph a = gridScene(spec, rng);
            const RoadGraph b = radialScene(spec, rng);
            const std::size_t offset = a.vertices.size();
            a.vertices.insert(a.vertices.end(), b.vertices.begin(), b.vertices.end());
            for (Edge e : b.edges) a.edges.push_back({e.a + offset, e.b + offset});
            g = planarize(a, 2.0);
            break;
        }
    }
    g = clipGraph(g, Rect{0.0, 0.0, spec.width - 1.0, spec.height - 1.0});
    g = largestComponent(cleanGraph(g, true));
    require(g.vertices.size() >= 2, ErrorCode::Contract, "scene density leaves fewer than two vertices");
    g.validate();
    return g;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<double> gaussianKernel(double sigma) {
    const int r = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> k(2 * r + 1);
    double sum = 0.0;
    for (int i = -r; i <= r; ++i) sum += k[i + r] = std::exp(-0.5 * i * i / (sigma * sigma));
    for (double& v : k) v /= sum;
    return k;
}

/// Separable blur with edge replication.
std::vector<double> blur(const Raster& in, const std::vector<double>& k) {
    const int w = in.width;
    const int h = in.height;
    const int r = static_cast<int>(k.size() / 2);
    std::vector<double> tmp(static_cast<std::size_t>(w) * h), out(tmp.size());
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double s = 0.0;
            for (int i = -r; i <= r; ++i) s += k[i + r] * in.at(std::clamp(x + i, 0, w - 1), y);
            tmp[static_cast<std::size_t>(y) * w + x] = s;
        }
    }
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double s = 0.0;
            for (int i = -r; i <= r; ++i) s += k[i + r] * tmp[static_cast<std::size_t>(std::clamp(y + i, 0, h - 1)) * w + x];
            out[static_cast<std::size_t>(y) * w + x] = s;
        }
    }
    return out;
}

}  // namespace

ProbMask noisyMasks(const RoadGraph& g, int width, int height, double noiseSigma, std::uint64_t seed,
                    double blurSigma) {
    require(noiseSigma >= 0.0 && std::isfinite(noiseSigma), ErrorCode::Contract, "noise sigma must be >= 0");
    require(blurSigma >= 0.0, ErrorCode::Contract, "blur sigma must be >= 0");
    const Raster road = rasterizeRoadMask(g, width, height);
    const Raster inter = rasterizeIntersectionMask(g, width, height);
    ProbMask out(width, height);
    const std::size_t n = static_cast<std::size_t>(width) * height;
    if (blurSigma > 0.0) {
        const auto k = gaussianKernel(blurSigma);
        const int r = static_cast<int>(k.size() / 2);
        double roadNorm = 0.0;
        for (int d = -1; d <= 1; ++d) roadNorm += k[d + r];
        double discNorm = 0.0;
        for (int dy = -3; dy <= 3; ++dy) {
            for (int dx = -3; dx <= 3; ++dx) {
                if (dx * dx + dy * dy <= 9) discNorm += k[dx + r] * k[dy + r];
            }
        }
        const auto br = blur(road, k);
        const auto bi = blur(inter, k);
        for (std::size_t i = 0; i < n; ++i) {
            out.data()[2 * i] = static_cast<float>(std::min(1.0, br[i] / roadNorm));
            out.data()[2 * i + 1] = static_cast<float>(std::min(1.0, bi[i] / discNorm));
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            out.data()[2 * i] = road.data[i];
            out.data()[2 * i + 1] = inter.data[i];
        }
    }
    if (noiseSigma > 0.0) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> noise(0.0, noiseSigma);
        for (float& v : out.data()) v = static_cast<float>(std::clamp(v + noise(rng), 0.0, 1.0));
    }
    return out;
}

// ---------------------------------------------------------------------------

FeatureMap analyticEncoder(const ProbMask& mask, const EncoderOptions& options) {
    require(options.scale >= 1 && options.channels >= 6 && options.patchStride >= 1, ErrorCode::Contract,
            "encoder needs scale >= 1, >= 6 channels and a positive patch stride");
    const int w = mask.width();
    const int h = mask.height();
    const int s = options.scale;
    const int wc = (w + s - 1) / s;
    const int hc = (h + s - 1) / s;
    FeatureMap out(wc, hc, options.channels, s);
    if (w == 0 || h == 0) return out;

    constexpr int kPatch = 7;
    const int projections = options.channels - 6;
    std::mt19937_64 rng(options.projectionSeed);
    std::normal_distribution<double> normal(0.0, 1.0 / kPatch);
    std::vector<double> proj(static_cast<std::size_t>(projections) * kPatch * kPatch);
    for (double& v : proj) v = normal(rng);

    auto road = [&](int x, int y) -> double {
        if (x < 0 || y < 0 || x >= w || y >= h) return 0.0;
        return mask.at(x, y, ProbMask::kRoad);
    };
    auto gradX = [&](int x, int y) { return 0.5 * (road(std::min(x + 1, w - 1), y) - road(std::max(x - 1, 0), y)); };
    auto gradY = [&](int x, int y) { return 0.5 * (road(x, std::min(y + 1, h - 1)) - road(x, std::max(y - 1, 0))); };

    constexpr int kBorder = 4;
    std::vector<double> patch(kPatch * kPatch);
    for (int cy = 0; cy < hc; ++cy) {
        for (int cx = 0; cx < wc; ++cx) {
            const int x0 = cx * s, y0 = cy * s;
            const int x1 = std::min(w, x0 + s), y1 = std::min(h, y0 + s);
            double sr = 0.0, si = 0.0;
            for (int y = y0; y < y1; ++y) {
                for (int x = x0; x < x1; ++x) {
                    sr += mask.at(x, y, ProbMask::kRoad);
                    si += mask.at(x, y, ProbMask::kIntersection);
                }
            }
            const double area = static_cast<double>(x1 - x0) * (y1 - y0);
            out.at(cx, cy, 0) = static_cast<float>(sr / area);
            out.at(cx, cy, 1) = static_cast<float>(si / area);

            double jxx = 0.0, jxy = 0.0, jyy = 0.0;
            for (int y = std::max(0, y0 - kBorder); y < std::min(h, y1 + kBorder); ++y) {
                for (int x = std::max(0, x0 - kBorder); x < std::min(w, x1 + kBorder); ++x) {
                    const double gx = gradX(x, y), gy = gradY(x, y);
                    jxx += gx * gx;
                    jxy += gx * gy;
                    jyy += gy * gy;
                }
            }
            const double trace = jxx + jyy;
            // The road runs across the dominant gradient, hence the sign flip.
            out.at(cx, cy, 2) = trace > 1e-9 ? static_cast<float>(-2.0 * jxy / trace) : 0.0f;
            out.at(cx, cy, 3) = trace > 1e-9 ? static_cast<float>(-(jxx - jyy) / trace) : 0.0f;

            out.at(cx, cy, 4) = static_cast<float>(2.0 * (cx + 0.5) / wc - 1.0);
            out.at(cx, cy, 5) = static_cast<float>(2.0 * (cy + 0.5) / hc - 1.0);

            const int px = x0 + s / 2, py = y0 + s / 2;
            for (int j = 0; j < kPatch; ++j) {
                for (int i = 0; i < kPatch; ++i) {
                    patch[j * kPatch + i] = road(px + options.patchStride * (i - kPatch / 2),
                                                 py + options.patchStride * (j - kPatch / 2));
                }
            }
            for (int p = 0; p < projections; ++p) {
                double acc = 0.0;
                for (int k = 0; k < kPatch * kPatch; ++k) acc += proj[static_cast<std::size_t>(p) * kPatch * kPatch + k] * patch[k];
                out.at(cx, cy, 6 + p) = static_cast<float>(acc);
            }
        }
    }
    return out;
}

}  // namespace roadgraph
