#include <cmath>

#include "roadgraph/error.hpp"
#include "roadgraph/labelgen.hpp"

namespace roadgraph {

Point rotatePoint90(Point p, int /*width*/, int height) {
    return {static_cast<double>(height - 1) - p.y, p.x};
}

ProbMask rotateMask90(const ProbMask& mask) {
    const int w = mask.width();
    const int h = mask.height();
    ProbMask out(h, w);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            for (int c = 0; c < 2; ++c) out.at(h - 1 - y, x, c) = mask.at(x, y, c);
        }
    }
    return out;
}

FeatureMap rotateFeatures90(const FeatureMap& fmap) {
    const int w = fmap.widthCells();
    const int h = fmap.heightCells();
    FeatureMap out(h, w, fmap.channels(), fmap.scale());
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            for (int c = 0; c < fmap.channels(); ++c) out.at(h - 1 - y, x, c) = fmap.at(x, y, c);
        }
    }
    return out;
}

namespace {

PatchBundle rotate(const PatchBundle& in, int quarterTurns) {
    PatchBundle out = in;
    const int turns = ((quarterTurns % 4) + 4) % 4;
    for (int k = 0; k < turns; ++k) {
        const int w = out.width;
        const int h = out.height;
        for (Point& p : out.graph.vertices) p = rotatePoint90(p, w, h);
        if (out.mask) out.mask = rotateMask90(*out.mask);
        if (out.features) out.features = rotateFeatures90(*out.features);
        out.width = h;
        out.height = w;
    }
    return out;
}

PatchBundle crop(const PatchBundle& in, const Crop& c) {
    require(c.width > 0 && c.height > 0 && c.x >= 0 && c.y >= 0 && c.x + c.width <= in.width &&
                c.y + c.height <= in.height,
            ErrorCode::Contract, "crop window leaves the patch");
    PatchBundle out;
    out.width = c.width;
    out.height = c.height;
    if (in.mask) out.mask = in.mask->crop(c.x, c.y, c.width, c.height);
    if (in.features) {
        const FeatureMap& f = *in.features;
        const int s = f.scale();
        require(c.x % s == 0 && c.y % s == 0 && c.width % s == 0 && c.height % s == 0, ErrorCode::Contract,
                "crop of a feature raster must align to its cells");
        const int cx0 = c.x / s;
        const int cy0 = c.y / s;
        const int cw = c.width / s;
        const int ch = c.height / s;
        require(cx0 + cw <= f.widthCells() && cy0 + ch <= f.heightCells(), ErrorCode::Contract,
                "crop window leaves the feature raster");
        FeatureMap cropped(cw, ch, f.channels(), s);
        for (int y = 0; y < ch; ++y) {
            for (int x = 0; x < cw; ++x) {
                for (int k = 0; k < f.channels(); ++k) cropped.at(x, y, k) = f.at(cx0 + x, cy0 + y, k);
            }
        }
        out.features = std::move(cropped);
    }
    RoadGraph shifted = in.graph;
    for (Point& p : shifted.vertices) p = p - Point{double(c.x), double(c.y)};
    out.graph = clipGraph(shifted, Rect{-0.5, -0.5, c.width - 0.5, c.height - 0.5});
    return out;
}

}  // namespace

PatchBundle augmentPatch(const PatchBundle& bundle, const AugmentOp& op) {
    if (const auto* r = std::get_if<Rot90>(&op)) return rotate(bundle, r->quarterTurns);
    return crop(bundle, std::get<Crop>(op));
}

}  // namespace roadgraph
