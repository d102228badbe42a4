#pragma once

#include <cstddef>

namespace roadgraph {

/// Vertex extraction and topology query settings. Distances are in pixels.
struct ExtractionConfig {
    double threshold{0.5};       // mask probability threshold t
    double nmsRadius{8.0};       // d_v
    double neighborRadius{64.0}; // R_nbr
    int maxNeighbors{16};        // N_nbr
    double edgeThreshold{0.5};
    double sigmaPerturb{1.0};
    int samplesPerPatch{512};    // N_sample

    /// Throws Error(Contract) when a field is out of range.
    void validate() const;
};

/// Evenly spaced, overlapping sliding windows over an image.
struct WindowGrid {
    int imageWidth{0};
    int imageHeight{0};
    int windowSize{512};
    int countX{1};
    int countY{1};

    int originX(int ix) const;
    int originY(int iy) const;
    std::size_t windowCount() const { return static_cast<std::size_t>(countX) * countY; }
};

/// round(k * (extent - window) / (count - 1)), or 0 for a single window.
int windowOrigin(int k, int count, int extent, int windowSize);

}  // namespace roadgraph
