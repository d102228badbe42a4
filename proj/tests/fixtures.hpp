#pragma once

#include <random>
#include <string>
#include <vector>

#include "roadgraph/tensor.hpp"
#include "roadgraph/toponet.hpp"

namespace fixture {

using roadgraph::FeatureMap;
using roadgraph::Point;
using roadgraph::TopoNetConfig;
using roadgraph::TopoNetParams;

inline FeatureMap randomFeatures(std::mt19937_64& rng, int cells, int channels) {
    std::normal_distribution<float> n(0, 1);
    FeatureMap f(cells, cells, channels);
    for (float& v : f.data()) v = n(rng);
    return f;
}

inline std::vector<Point> randomVertices(std::mt19937_64& rng, int count, double extent) {
    std::uniform_real_distribution<double> u(0, extent);
    std::vector<Point> v(count);
    for (Point& p : v) p = {u(rng), u(rng)};
    return v;
}

/// Params with every tensor (layer norms and biases included) randomised so
/// no gradient is trivially zero.
inline TopoNetParams randomParams(const TopoNetConfig& cfg, std::uint64_t seed) {
    TopoNetParams p = TopoNetParams::initialize(cfg, seed);
    std::mt19937_64 rng(seed + 1);
    std::uniform_real_distribution<double> u(-0.3, 0.3);
    p.forEachTensor([&](const std::string& name, auto& t) {
        const bool gain = name.find("gamma") != std::string::npos;
        for (Eigen::Index i = 0; i < t.size(); ++i) t.data()[i] = gain ? 1.0 + u(rng) : t.data()[i] + u(rng) * 0.5;
    });
    return p;
}

}  // namespace fixture
