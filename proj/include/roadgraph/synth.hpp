#pragma once

#include <cstdint>
#include <string>

#include "roadgraph/graph.hpp"
#include "roadgraph/tensor.hpp"

namespace roadgraph {

enum class SceneStyle { Grid, Radial, Mixed };

SceneStyle parseSceneStyle(const std::string& name);
std::string sceneStyleName(SceneStyle style);

struct SceneSpec {
    int width{512};
    int height{512};
    SceneStyle style{SceneStyle::Grid};
    double density{1.0};       // street spacing divides by this
    std::uint64_t seed{0};
    double jitter{4.0};        // lattice node jitter, pixels
    double dropFraction{0.1};  // share of interior grid edges removed (never bridges)
};

/// Planar, connected synthetic road network inside [0, width-1] x [0, height-1].
/// Throws Error(Contract) for extents below 256 px or a non-positive density,
/// and when fewer than two vertices survive.
RoadGraph generateScene(const SceneSpec& spec);

/// Rasterized labels, optionally blurred (Gaussian, blurSigma px) and
/// renormalised so a straight road's centre and an isolated intersection's
/// centre stay at 1, plus i.i.d. Gaussian noise, clamped to [0, 1].
ProbMask noisyMasks(const RoadGraph& g, int width, int height, double noiseSigma, std::uint64_t seed,
                    double blurSigma = 3.0);

struct EncoderOptions {
    int scale{16};
    int channels{32};
    int patchStride{3};               // pixels between samples of the 7x7 patch
    std::uint64_t projectionSeed{0x5eed};
};

/// Feature raster of one window mask at 1/scale resolution:
///   0     mean road probability of the cell
///   1     mean intersection probability
///   2, 3  coherence-weighted (sin 2t, cos 2t) of the local road direction
///   4, 5  cell centre in window coordinates, mapped to [-1, 1]
///   6..   fixed random projections of a 7x7 road-probability patch
FeatureMap analyticEncoder(const ProbMask& windowMask, const EncoderOptions& options = {});

}  // namespace roadgraph
