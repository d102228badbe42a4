#include "roadgraph/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "roadgraph/error.hpp"

namespace roadgraph {

namespace {

std::pair<std::size_t, std::size_t> ordered(const Edge& e) {
    return e.a < e.b ? std::make_pair(e.a, e.b) : std::make_pair(e.b, e.a);
}

}  // namespace

void RoadGraph::validate() const {
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        const Point& p = vertices[i];
        require(std::isfinite(p.x) && std::isfinite(p.y), ErrorCode::Contract,
                "vertex " + std::to_string(i) + " has non-finite coordinates");
    }
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (std::size_t k = 0; k < edges.size(); ++k) {
        const Edge& e = edges[k];
        require(e.a < vertices.size() && e.b < vertices.size(), ErrorCode::Contract,
                "edge " + std::to_string(k) + " references a missing vertex");
        require(e.a != e.b, ErrorCode::Contract, "edge " + std::to_string(k) + " is a self-loop");
        require(seen.insert(ordered(e)).second, ErrorCode::Contract,
                "edge " + std::to_string(k) + " duplicates an earlier edge");
    }
}

std::vector<std::size_t> RoadGraph::degrees() const {
    std::vector<std::size_t> deg(vertices.size(), 0);
    for (const Edge& e : edges) {
        ++deg[e.a];
        ++deg[e.b];
    }
    return deg;
}

double RoadGraph::totalLength() const {
    double total = 0.0;
    for (const Edge& e : edges) total += edgeLength(e);
    return total;
}

Adjacency buildAdjacency(const RoadGraph& g) {
    Adjacency adj(g.vertices.size());
    for (std::size_t k = 0; k < g.edges.size(); ++k) {
        const Edge& e = g.edges[k];
        const double len = g.edgeLength(e);
        adj[e.a].push_back({e.b, k, len});
        adj[e.b].push_back({e.a, k, len});
    }
    return adj;
}

std::vector<std::size_t> connectedComponents(const RoadGraph& g, std::size_t* componentCount) {
    constexpr std::size_t kUnset = static_cast<std::size_t>(-1);
    const Adjacency adj = buildAdjacency(g);
    std::vector<std::size_t> comp(g.vertices.size(), kUnset);
    std::size_t next = 0;
    std::vector<std::size_t> stack;
    for (std::size_t s = 0; s < comp.size(); ++s) {
        if (comp[s] != kUnset) continue;
        comp[s] = next;
        stack.push_back(s);
        while (!stack.empty()) {
            const std::size_t v = stack.back();
            stack.pop_back();
            for (const Neighbor& n : adj[v]) {
                if (comp[n.vertex] == kUnset) {
                    comp[n.vertex] = next;
                    stack.push_back(n.vertex);
                }
            }
        }
        ++next;
    }
    if (componentCount) *componentCount = next;
    return comp;
}

RoadGraph cleanGraph(const RoadGraph& g, bool dropIsolated) {
    std::set<std::pair<std::size_t, std::size_t>> seen;
    std::vector<Edge> edges;
    for (const Edge& e : g.edges) {
        if (e.a == e.b) continue;
        if (seen.insert(ordered(e)).second) edges.push_back(e);
    }
    std::vector<bool> keep(g.vertices.size(), !dropIsolated);
    for (const Edge& e : edges) keep[e.a] = keep[e.b] = true;

    RoadGraph out;
    std::vector<std::size_t> remap(g.vertices.size(), 0);
    for (std::size_t i = 0; i < g.vertices.size(); ++i) {
        if (!keep[i]) continue;
        remap[i] = out.vertices.size();
        out.vertices.push_back(g.vertices[i]);
    }
    out.edges.reserve(edges.size());
    for (const Edge& e : edges) out.edges.push_back({remap[e.a], remap[e.b]});
    return out;
}

RoadGraph largestComponent(const RoadGraph& g) {
    std::size_t count = 0;
    const auto comp = connectedComponents(g, &count);
    if (count <= 1) return g;
    std::vector<double> length(count, 0.0);
    std::vector<std::size_t> size(count, 0);
    for (const Edge& e : g.edges) length[comp[e.a]] += g.edgeLength(e);
    for (std::size_t c : comp) ++size[c];
    std::size_t best = 0;
    for (std::size_t c = 1; c < count; ++c) {
        if (length[c] > length[best] || (length[c] == length[best] && size[c] > size[best])) best = c;
    }
    RoadGraph out;
    std::vector<std::size_t> remap(g.vertices.size(), 0);
    for (std::size_t i = 0; i < g.vertices.size(); ++i) {
        if (comp[i] != best) continue;
        remap[i] = out.vertices.size();
        out.vertices.push_back(g.vertices[i]);
    }
    for (const Edge& e : g.edges) {
        if (comp[e.a] == best) out.edges.push_back({remap[e.a], remap[e.b]});
    }
    return out;
}

RoadGraph clipGraph(const RoadGraph& g, const Rect& r) {
    RoadGraph out;
    constexpr std::size_t kOutside = static_cast<std::size_t>(-1);
    std::vector<std::size_t> remap(g.vertices.size(), kOutside);
    for (std::size_t i = 0; i < g.vertices.size(); ++i) {
        if (!r.contains(g.vertices[i])) continue;
        remap[i] = out.vertices.size();
        out.vertices.push_back(g.vertices[i]);
    }
    // Clip points lie on the boundary; interpolation rounding can leave them a
    // hair to either side.
    auto snap = [](double v, double lo, double hi) {
        constexpr double kEps = 1e-9;
        if (v <= lo + kEps) return lo;
        if (v >= hi - kEps) return hi;
        return v;
    };
    auto addPoint = [&](Point p) {
        out.vertices.push_back({snap(p.x, r.minX, r.maxX), snap(p.y, r.minY, r.maxY)});
        return out.vertices.size() - 1;
    };
    for (const Edge& e : g.edges) {
        const std::size_t ia = remap[e.a];
        const std::size_t ib = remap[e.b];
        if (ia != kOutside && ib != kOutside) {
            out.edges.push_back({ia, ib});
            continue;
        }
        const Point a = g.vertices[e.a];
        const Point b = g.vertices[e.b];
        double t0 = 0.0;
        double t1 = 1.0;
        if (!clipSegment(a, b, r, t0, t1)) continue;
        const std::size_t na = ia != kOutside ? ia : addPoint(lerp(a, b, t0));
        const std::size_t nb = ib != kOutside ? ib : addPoint(lerp(a, b, t1));
        if (out.vertices[na] == out.vertices[nb]) {
            // Segment only grazes a corner of the rectangle.
            continue;
        }
        out.edges.push_back({na, nb});
    }
    return cleanGraph(out, false);
}

std::string graphToJson(const RoadGraph& g) {
    nlohmann::json doc;
    nlohmann::json verts = nlohmann::json::array();
    for (const Point& p : g.vertices) verts.push_back({p.x, p.y});
    nlohmann::json edges = nlohmann::json::array();
    for (const Edge& e : g.edges) edges.push_back({e.a, e.b});
    doc["vertices"] = std::move(verts);
    doc["edges"] = std::move(edges);
    return doc.dump();
}

RoadGraph graphFromJson(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& ex) {
        fail(ErrorCode::Format, std::string("graph document is not valid JSON: ") + ex.what());
    }
    require(doc.is_object() && doc.contains("vertices") && doc.contains("edges"), ErrorCode::Format,
            "graph document needs \"vertices\" and \"edges\" arrays");
    RoadGraph g;
    try {
        for (const auto& v : doc.at("vertices")) {
            require(v.is_array() && v.size() == 2, ErrorCode::Format, "vertex entries must be [x, y]");
            g.vertices.push_back({v[0].get<double>(), v[1].get<double>()});
        }
        for (const auto& e : doc.at("edges")) {
            require(e.is_array() && e.size() == 2, ErrorCode::Format, "edge entries must be [i, j]");
            g.edges.push_back({e[0].get<std::size_t>(), e[1].get<std::size_t>()});
        }
    } catch (const nlohmann::json::exception& ex) {
        fail(ErrorCode::Format, std::string("malformed graph document: ") + ex.what());
    }
    g.validate();
    return g;
}

void saveGraph(const std::filesystem::path& path, const RoadGraph& g) {
    std::ofstream out(path);
    require(static_cast<bool>(out), ErrorCode::Io, "cannot open " + path.string() + " for writing");
    out << graphToJson(g) << '\n';
    require(static_cast<bool>(out), ErrorCode::Io, "failed writing " + path.string());
}

RoadGraph loadGraph(const std::filesystem::path& path) {
    std::ifstream in(path);
    require(static_cast<bool>(in), ErrorCode::Io, "cannot open " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return graphFromJson(buf.str());
}

}  // namespace roadgraph
