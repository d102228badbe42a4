#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "roadgraph/graph.hpp"
#include "roadgraph/tensor.hpp"

namespace roadgraph {

struct RenderOptions {
    int width{0};
    int height{0};
    const ProbMask* background{nullptr};  // road channel drawn as grey levels
};

/// Edges as lines, vertices as dots; vertices of degree != 2 are drawn larger
/// and in a second colour.
std::string renderSvg(const RoadGraph& g, const RenderOptions& options);

/// Binary PPM (P6) image of the same overlay.
std::vector<std::uint8_t> renderPpm(const RoadGraph& g, const RenderOptions& options);

/// Picks SVG or PPM from the extension of `path`.
void renderToFile(const std::filesystem::path& path, const RoadGraph& g, const RenderOptions& options);

}  // namespace roadgraph
