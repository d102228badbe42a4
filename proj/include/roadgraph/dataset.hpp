#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "roadgraph/config.hpp"
#include "roadgraph/graph.hpp"
#include "roadgraph/inference.hpp"
#include "roadgraph/synth.hpp"
#include "roadgraph/tensor.hpp"

namespace roadgraph {

/// Contents of meta.txt in a dataset directory.
struct DatasetMeta {
    int imageWidth{0};
    int imageHeight{0};
    int windowSize{512};
    int countX{1};
    int countY{1};
    int featureScale{16};

    WindowGrid grid() const { return WindowGrid{imageWidth, imageHeight, windowSize, countX, countY}; }
};

void writeMeta(const std::filesystem::path& path, const DatasetMeta& meta);
DatasetMeta readMeta(const std::filesystem::path& path);

/// <dir>/<sub>/win_{ix}_{iy}.rgt
std::filesystem::path windowFile(const std::filesystem::path& dir, const std::string& sub, int ix, int iy);

/// Writes masks/ and feats/ window tensors cut from `fullMask` (features from
/// the analytic encoder on each window mask), meta.txt and, if given,
/// graph.json.
void writeDataset(const std::filesystem::path& dir, const ProbMask& fullMask, const DatasetMeta& meta,
                  const EncoderOptions& encoder, const RoadGraph* graph = nullptr, int threads = 1);

/// Providers reading masks/ and feats/ from `dir`.
WindowSource datasetWindowSource(const std::filesystem::path& dir, const DatasetMeta& meta);

}  // namespace roadgraph
