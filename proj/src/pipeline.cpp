#include "roadgraph/pipeline.hpp"

#include <random>

#include "roadgraph/error.hpp"

namespace roadgraph {

RoadGraph windowGraph(const RoadGraph& g, int originX, int originY, int width, int height) {
    RoadGraph shifted = g;
    for (Point& p : shifted.vertices) p = p - Point{double(originX), double(originY)};
    return clipGraph(shifted, Rect{-0.5, -0.5, width - 0.5, height - 0.5});
}

TrainingPatch makeTrainingPatch(const ProbMask& mask, const RoadGraph& graph, const ExtractionConfig& cfg,
                                const EncoderOptions& encoder, std::uint64_t seed, LabeledPatch* labeled) {
    TrainingPatch patch;
    patch.features = analyticEncoder(mask, encoder);
    LabeledPatch lp = makeTopoSamples(graph, patch.features.windowExtent(), cfg, seed);
    patch.vertices = lp.inputVertices;
    patch.samples = lp.samples;
    if (labeled) *labeled = std::move(lp);
    return patch;
}

std::vector<TrainingPatch> sceneTrainingPatches(const RoadGraph& g, const ProbMask& mask,
                                                const ScenePatchOptions& options, const ExtractionConfig& cfg,
                                                const EncoderOptions& encoder, std::uint64_t seed) {
    require(options.patchSize <= mask.width() && options.patchSize <= mask.height(), ErrorCode::Contract,
            "patch size exceeds the scene");
    std::mt19937_64 rng(seed);
    std::vector<TrainingPatch> out;
    for (int i = 0; i < options.patchesPerScene; ++i) {
        PatchBundle bundle{mask.width(), mask.height(), mask, std::nullopt, g};
        if (options.rotate) {
            const int turns = std::uniform_int_distribution<int>(0, 3)(rng);
            bundle = augmentPatch(bundle, Rot90{turns});
        }
        const int x = std::uniform_int_distribution<int>(0, bundle.width - options.patchSize)(rng);
        const int y = std::uniform_int_distribution<int>(0, bundle.height - options.patchSize)(rng);
        bundle = augmentPatch(bundle, Crop{x, y, options.patchSize, options.patchSize});
        out.push_back(makeTrainingPatch(*bundle.mask, bundle.graph, cfg, encoder, rng()));
    }
    return out;
}

}  // namespace roadgraph
