#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "roadgraph/config.hpp"
#include "roadgraph/graph.hpp"
#include "roadgraph/tensor.hpp"
#include "roadgraph/toponet.hpp"

namespace roadgraph {

/// Splits every edge longer than `maxSegment` into equal pieces no longer than
/// it. Original vertices keep their indices; new ones are appended.
RoadGraph subdivideGraph(const RoadGraph& g, double maxSegment);

/// Vertices picked from a subdivided graph the way inference would pick them
/// from a mask. `anchors[i]` is the subdivided-graph vertex behind vertex i.
struct EmulatedVertices {
    std::vector<Point> positions;
    std::vector<std::size_t> anchors;
};

struct EmulationOptions {
    /// Give degree != 2 vertices the same +2 priority the intersection
    /// channel receives at inference time.
    bool intersectionPriority{true};
};

/// Uniform(0,1) random score per subdivision vertex, then NMS with d_v.
EmulatedVertices emulateVertexPrediction(const RoadGraph& subdivided, const ExtractionConfig& cfg,
                                         std::uint64_t seed, EmulationOptions options = {});

/// Label per target: 1 iff a shortest-distance expansion from the source's
/// anchor reaches the target's anchor within `radius` of path length without
/// passing through any target anchor. `targets` are emulated vertex indices.
std::vector<std::uint8_t> connectivityLabels(const RoadGraph& subdivided, const EmulatedVertices& emulated,
                                             std::size_t source, std::span<const std::size_t> targets,
                                             double radius);

/// Teacher-forcing samples for one patch.
struct LabeledPatch {
    RoadGraph subdivided;
    EmulatedVertices emulated;
    std::vector<Point> inputVertices;  // emulated positions plus Gaussian noise
    std::vector<TopoSample> samples;   // offsets follow inputVertices
};

/// Subdivides `g` at d_v/4, emulates vertex prediction, labels min(N_sample,
/// n) random sources and perturbs the network-input coordinates (clamped to
/// `extent`). Labels are computed on the unperturbed anchors.
LabeledPatch makeTopoSamples(const RoadGraph& g, const Rect& extent, const ExtractionConfig& cfg,
                             std::uint64_t seed, EmulationOptions options = {});

/// Writes one RGT1 tensor per sample (slots x [dx, dy, valid, label]) plus a
/// text index for inspection.
void dumpSamples(const std::filesystem::path& dir, const LabeledPatch& patch);

// ---------------------------------------------------------------------------
// Augmentation

/// Image-aligned data that must move together.
struct PatchBundle {
    int width{0};
    int height{0};
    std::optional<ProbMask> mask;
    std::optional<FeatureMap> features;
    RoadGraph graph;
};

/// Clockwise rotation by quarterTurns * 90 degrees.
struct Rot90 {
    int quarterTurns{1};
};

/// Pixel window [x, x+width) x [y, y+height).
struct Crop {
    int x{0};
    int y{0};
    int width{0};
    int height{0};
};

using AugmentOp = std::variant<Rot90, Crop>;

PatchBundle augmentPatch(const PatchBundle& bundle, const AugmentOp& op);

/// Clockwise quarter turn maps (x, y) to (height - 1 - y, x).
Point rotatePoint90(Point p, int width, int height);
ProbMask rotateMask90(const ProbMask& mask);
FeatureMap rotateFeatures90(const FeatureMap& fmap);

}  // namespace roadgraph
