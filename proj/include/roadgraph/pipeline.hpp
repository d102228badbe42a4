#pragma once

#include <cstdint>
#include <vector>

#include "roadgraph/config.hpp"
#include "roadgraph/graph.hpp"
#include "roadgraph/labelgen.hpp"
#include "roadgraph/synth.hpp"
#include "roadgraph/tensor.hpp"
#include "roadgraph/toponet.hpp"

namespace roadgraph {

/// Graph restricted to the window [ox, ox+size) x [oy, oy+size), in window
/// coordinates, clipped to the window's continuous extent.
RoadGraph windowGraph(const RoadGraph& g, int originX, int originY, int width, int height);

/// Encodes `mask` and labels samples for `graph` (both in window coordinates).
TrainingPatch makeTrainingPatch(const ProbMask& mask, const RoadGraph& graph, const ExtractionConfig& cfg,
                                const EncoderOptions& encoder, std::uint64_t seed,
                                LabeledPatch* labeled = nullptr);

struct ScenePatchOptions {
    int patchSize{256};
    int patchesPerScene{8};
    bool rotate{true};  // random quarter turn before cropping
};

/// Random rotated crops of one scene turned into training patches.
std::vector<TrainingPatch> sceneTrainingPatches(const RoadGraph& g, const ProbMask& mask,
                                                const ScenePatchOptions& options, const ExtractionConfig& cfg,
                                                const EncoderOptions& encoder, std::uint64_t seed);

}  // namespace roadgraph
