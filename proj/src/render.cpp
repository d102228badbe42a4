#include "roadgraph/render.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "roadgraph/error.hpp"

namespace roadgraph {

namespace {

struct Rgb {
    std::uint8_t r, g, b;
};

constexpr Rgb kEdgeColor{255, 170, 0};
constexpr Rgb kVertexColor{40, 120, 255};
constexpr Rgb kJunctionColor{230, 30, 30};

void checkOptions(const RenderOptions& o) {
    require(o.width > 0 && o.height > 0, ErrorCode::Contract, "render extent must be positive");
    if (o.background) {
        require(o.background->width() == o.width && o.background->height() == o.height, ErrorCode::Shape,
                "background mask does not match the render extent");
    }
}

}  // namespace

std::string renderSvg(const RoadGraph& g, const RenderOptions& o) {
    checkOptions(o);
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << o.width << "\" height=\"" << o.height
        << "\" viewBox=\"-0.5 -0.5 " << o.width << ' ' << o.height << "\">\n";
    out << "<rect x=\"-0.5\" y=\"-0.5\" width=\"" << o.width << "\" height=\"" << o.height << "\" fill=\"black\"/>\n";
    if (o.background) {
        // One rect per run of equal grey level along a row keeps files small.
        out << "<g shape-rendering=\"crispEdges\">\n";
        for (int y = 0; y < o.height; ++y) {
            int x = 0;
            while (x < o.width) {
                const int level = static_cast<int>(std::lround(o.background->at(x, y, ProbMask::kRoad) * 15.0));
                int end = x + 1;
                while (end < o.width &&
                       static_cast<int>(std::lround(o.background->at(end, y, ProbMask::kRoad) * 15.0)) == level) {
                    ++end;
                }
                if (level > 0) {
                    const int grey = level * 17 / 2;
                    out << "<rect x=\"" << x - 0.5 << "\" y=\"" << y - 0.5 << "\" width=\"" << end - x
                        << "\" height=\"1\" fill=\"rgb(" << grey << ',' << grey << ',' << grey << ")\"/>\n";
                }
                x = end;
            }
        }
        out << "</g>\n";
    }
    out << "<g stroke=\"rgb(" << int(kEdgeColor.r) << ',' << int(kEdgeColor.g) << ',' << int(kEdgeColor.b)
        << ")\" stroke-width=\"1.5\">\n";
    for (const Edge& e : g.edges) {
        const Point a = g.vertices[e.a], b = g.vertices[e.b];
        out << "<line x1=\"" << a.x << "\" y1=\"" << a.y << "\" x2=\"" << b.x << "\" y2=\"" << b.y << "\"/>\n";
    }
    out << "</g>\n";
    const auto deg = g.degrees();
    for (std::size_t v = 0; v < g.vertices.size(); ++v) {
        const bool junction = deg[v] != 2;
        const Rgb c = junction ? kJunctionColor : kVertexColor;
        out << "<circle cx=\"" << g.vertices[v].x << "\" cy=\"" << g.vertices[v].y << "\" r=\""
            << (junction ? 3.0 : 1.5) << "\" fill=\"rgb(" << int(c.r) << ',' << int(c.g) << ',' << int(c.b)
            << ")\"/>\n";
    }
    out << "</svg>\n";
    return out.str();
}

std::vector<std::uint8_t> renderPpm(const RoadGraph& g, const RenderOptions& o) {
    checkOptions(o);
    const std::string header = "P6\n" + std::to_string(o.width) + " " + std::to_string(o.height) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    const std::size_t base = out.size();
    out.resize(base + static_cast<std::size_t>(o.width) * o.height * 3, 0);
    auto put = [&](long x, long y, Rgb c) {
        if (x < 0 || y < 0 || x >= o.width || y >= o.height) return;
        const std::size_t i = base + (static_cast<std::size_t>(y) * o.width + x) * 3;
        out[i] = c.r;
        out[i + 1] = c.g;
        out[i + 2] = c.b;
    };
    if (o.background) {
        for (int y = 0; y < o.height; ++y) {
            for (int x = 0; x < o.width; ++x) {
                const auto grey = static_cast<std::uint8_t>(std::lround(o.background->at(x, y, ProbMask::kRoad) * 127.0));
                put(x, y, {grey, grey, grey});
            }
        }
    }
    for (const Edge& e : g.edges) {
        const Point a = g.vertices[e.a], b = g.vertices[e.b];
        const int steps = std::max(1, static_cast<int>(std::ceil(distance(a, b) * 2.0)));
        for (int s = 0; s <= steps; ++s) {
            const Point p = lerp(a, b, static_cast<double>(s) / steps);
            put(std::lround(p.x), std::lround(p.y), kEdgeColor);
        }
    }
    const auto deg = g.degrees();
    for (std::size_t v = 0; v < g.vertices.size(); ++v) {
        const bool junction = deg[v] != 2;
        const int r = junction ? 2 : 1;
        const Point p = g.vertices[v];
        for (int dy = -r; dy <= r; ++dy) {
            for (int dx = -r; dx <= r; ++dx) {
                if (dx * dx + dy * dy <= r * r) {
                    put(std::lround(p.x) + dx, std::lround(p.y) + dy, junction ? kJunctionColor : kVertexColor);
                }
            }
        }
    }
    return out;
}

void renderToFile(const std::filesystem::path& path, const RoadGraph& g, const RenderOptions& options) {
    const std::string ext = path.extension().string();
    require(ext == ".svg" || ext == ".ppm", ErrorCode::Usage, "render output must end in .svg or .ppm");
    std::ofstream out(path, std::ios::binary);
    require(static_cast<bool>(out), ErrorCode::Io, "cannot write " + path.string());
    if (ext == ".svg") {
        out << renderSvg(g, options);
    } else {
        const auto bytes = renderPpm(g, options);
        out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    }
    require(static_cast<bool>(out), ErrorCode::Io, "write failed: " + path.string());
}

}  // namespace roadgraph
