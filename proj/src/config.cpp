#include "roadgraph/config.hpp"

#include <cmath>
#include <string>

#include "roadgraph/error.hpp"

namespace roadgraph {

const char* errorCodeName(ErrorCode code) {
    switch (code) {
        case ErrorCode::Io: return "E_IO";
        case ErrorCode::Format: return "E_FORMAT";
        case ErrorCode::Shape: return "E_SHAPE";
        case ErrorCode::Contract: return "E_CONTRACT";
        case ErrorCode::Numeric: return "E_NUMERIC";
        case ErrorCode::Usage: return "E_USAGE";
    }
    return "E_UNKNOWN";
}

void ExtractionConfig::validate() const {
    require(threshold > 0.0 && threshold < 1.0, ErrorCode::Contract, "threshold must lie in (0,1)");
    require(edgeThreshold > 0.0 && edgeThreshold < 1.0, ErrorCode::Contract, "edge threshold must lie in (0,1)");
    require(nmsRadius > 0.0, ErrorCode::Contract, "NMS radius must be positive");
    require(neighborRadius > nmsRadius, ErrorCode::Contract, "neighbor radius must exceed the NMS radius");
    require(maxNeighbors >= 1, ErrorCode::Contract, "max neighbors must be at least 1");
    require(sigmaPerturb >= 0.0, ErrorCode::Contract, "perturbation sigma must be non-negative");
    require(samplesPerPatch >= 1, ErrorCode::Contract, "samples per patch must be at least 1");
}

int windowOrigin(int k, int count, int extent, int windowSize) {
    if (count <= 1) return 0;
    return static_cast<int>(std::lround(static_cast<double>(k) * (extent - windowSize) / (count - 1)));
}

int WindowGrid::originX(int ix) const { return windowOrigin(ix, countX, imageWidth, windowSize); }
int WindowGrid::originY(int iy) const { return windowOrigin(iy, countY, imageHeight, windowSize); }

}  // namespace roadgraph
