#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "roadgraph/geometry.hpp"

namespace roadgraph {

struct Edge {
    std::size_t a{0};
    std::size_t b{0};

    friend bool operator==(const Edge&, const Edge&) = default;
};

/// Undirected road network: sample points plus traversable segments.
struct RoadGraph {
    std::vector<Point> vertices;
    std::vector<Edge> edges;

    /// Throws Error(Contract) on out-of-range indices, self-loops, duplicate
    /// edges (unordered) or non-finite coordinates.
    void validate() const;

    std::vector<std::size_t> degrees() const;
    double edgeLength(const Edge& e) const { return distance(vertices[e.a], vertices[e.b]); }
    double totalLength() const;

    friend bool operator==(const RoadGraph&, const RoadGraph&) = default;
};

struct Neighbor {
    std::size_t vertex;
    std::size_t edge;
    double length;
};

using Adjacency = std::vector<std::vector<Neighbor>>;

Adjacency buildAdjacency(const RoadGraph& g);

/// Connected component id per vertex; ids are dense and ordered by first vertex.
std::vector<std::size_t> connectedComponents(const RoadGraph& g, std::size_t* componentCount = nullptr);

/// Removes duplicate/self-loop edges and drops vertices no edge references when
/// `dropIsolated` is set. Vertex order is otherwise preserved.
RoadGraph cleanGraph(const RoadGraph& g, bool dropIsolated);

/// Keeps only the connected component with the greatest total edge length.
RoadGraph largestComponent(const RoadGraph& g);

/// Clips every edge to `r`, inserting a vertex where an edge crosses the
/// boundary. Vertices outside `r` are removed.
RoadGraph clipGraph(const RoadGraph& g, const Rect& r);

std::string graphToJson(const RoadGraph& g);
RoadGraph graphFromJson(std::string_view text);
void saveGraph(const std::filesystem::path& path, const RoadGraph& g);
RoadGraph loadGraph(const std::filesystem::path& path);

}  // namespace roadgraph
