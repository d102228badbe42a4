#pragma once

#include <cstdint>

#include "roadgraph/graph.hpp"

namespace roadgraph {

struct TopoParams {
    double matchRadius{8.0};
    double propagationRadius{300.0};
    double sampleInterval{5.0};
    int seedCount{500};
    std::uint64_t seed{0};
    int threads{1};
};

struct TopoScore {
    double precision{0.0};
    double recall{0.0};
    double f1{0.0};
    std::uint64_t matchedHoles{0};
    std::uint64_t totalHoles{0};
    std::uint64_t matchedMarbles{0};
    std::uint64_t totalMarbles{0};
};

/// Reachable-subgraph comparison. Seeds are drawn by arc length on gt (for
/// recall: holes matched / holes) and on pred (for precision: marbles matched
/// / marbles). A seed with no counterpart within matchRadius on the other
/// graph contributes its own samples as unmatched. Throws Error(Contract)
/// when gt has no edge length.
TopoScore toposcore(const RoadGraph& gt, const RoadGraph& pred, const TopoParams& params = {});

struct AplsParams {
    double snapRadius{4.0};
    int pairCount{500};
    std::uint64_t seed{0};
    int threads{1};
};

struct AplsScore {
    double apls{0.0};
    double gtToPred{0.0};
    double predToGt{0.0};
    int pairs{0};            // pairs scored per direction
};

/// 1 - min(1, |lengthGt - lengthPred| / lengthGt); lengthGt must be > 0.
double aplsPairScore(double lengthGt, double lengthPred);

/// Symmetric path-length similarity: mean of the gt->pred and pred->gt
/// directional scores. Throws Error(Contract) when gt has no connected pair.
AplsScore apls(const RoadGraph& gt, const RoadGraph& pred, const AplsParams& params = {});

}  // namespace roadgraph
