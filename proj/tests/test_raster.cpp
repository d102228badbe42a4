#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "roadgraph/error.hpp"
#include "roadgraph/raster.hpp"

using namespace roadgraph;

TEST_CASE("road raster") {
    SUBCASE("empty graph") {
        const Raster r = rasterizeRoadMask(RoadGraph{}, 8, 8);
        for (float v : r.data) CHECK(v == 0.0f);
    }
    SUBCASE("vertical edge is a three-pixel stroke with round caps") {
        RoadGraph g{{{5, 0}, {5, 10}}, {{0, 1}}};
        const Raster r = rasterizeRoadMask(g, 16, 16);
        for (int y = 0; y <= 10; ++y) {
            for (int x = 0; x < 16; ++x) CHECK(r.at(x, y) == (x >= 4 && x <= 6 ? 1.0f : 0.0f));
        }
        // Cap below the end point: (5,11) at distance 1, (4,11) at sqrt(2) <= 1.5, (5,12) at 2.
        CHECK(r.at(5, 11) == 1.0f);
        CHECK(r.at(4, 11) == 1.0f);
        CHECK(r.at(3, 11) == 0.0f);
        CHECK(r.at(5, 12) == 0.0f);
        CHECK(r.data == oracle::roadRaster(g, 16, 16));
    }
    SUBCASE("matches the per-pixel oracle on random graphs") {
        std::mt19937_64 rng(11);
        for (int trial = 0; trial < 30; ++trial) {
            RoadGraph g = oracle::randomGraph(rng, 8, 4, 40.0);
            // Coordinates partly outside the raster exercise the bounds handling.
            for (Point& p : g.vertices) p = p - Point{4, 4};
            CHECK(rasterizeRoadMask(g, 32, 36).data == oracle::roadRaster(g, 32, 36));
        }
    }
    SUBCASE("deterministic") {
        std::mt19937_64 rng(2);
        const RoadGraph g = oracle::randomGraph(rng, 10, 5, 50.0);
        CHECK(rasterizeRoadMask(g, 50, 50) == rasterizeRoadMask(g, 50, 50));
    }
}

TEST_CASE("intersection raster") {
    SUBCASE("only vertices of degree other than two") {
        RoadGraph path{{{5, 5}, {15, 5}, {25, 5}}, {{0, 1}, {1, 2}}};
        const Raster r = rasterizeIntersectionMask(path, 32, 12);
        CHECK(r.at(5, 5) == 1.0f);
        CHECK(r.at(25, 5) == 1.0f);
        CHECK(r.at(15, 5) == 0.0f);
    }
    SUBCASE("a disc of radius three covers 29 pixels") {
        RoadGraph star{{{10, 10}, {30, 10}, {10, 30}, {-10, 10}}, {{0, 1}, {0, 2}, {0, 3}}};
        const Raster r = rasterizeIntersectionMask(star, 21, 21);
        int count = 0;
        for (int y = 0; y < 21; ++y) {
            for (int x = 0; x < 21; ++x) count += r.at(x, y) > 0 && (x - 10) * (x - 10) + (y - 10) * (y - 10) <= 16;
        }
        CHECK(count == 29);
    }
    SUBCASE("cycle has no intersections") {
        RoadGraph cycle{{{2, 2}, {10, 2}, {10, 10}, {2, 10}}, {{0, 1}, {1, 2}, {2, 3}, {3, 0}}};
        for (float v : rasterizeIntersectionMask(cycle, 12, 12).data) CHECK(v == 0.0f);
    }
}

TEST_CASE("fusion averages observations") {
    FusionAccumulator acc(4, 4);
    ProbMask a(2, 2), b(2, 2);
    for (float& v : a.data()) v = 0.4f;
    for (float& v : b.data()) v = 0.8f;
    acc.accumulateWindow(0, 0, a);
    acc.accumulateWindow(1, 1, b);
    CHECK(acc.fused(0, 0, 0) == doctest::Approx(0.4));
    CHECK(acc.fused(1, 1, 0) == doctest::Approx(0.6));
    CHECK(acc.fused(2, 2, 1) == doctest::Approx(0.8));
    CHECK(acc.fused(3, 3, 0) == 0.0f);
    CHECK(acc.count(1, 1) == 2);
    CHECK(acc.count(3, 0) == 0);

    FusionAccumulator single(2, 2);
    ProbMask p(2, 2);
    p.at(0, 0, 0) = 0.7f;
    single.accumulateWindow(0, 0, p);
    CHECK(finalizeFusion(single).at(0, 0, 0) == doctest::Approx(0.7));

    CHECK_THROWS_AS(acc.accumulateWindow(3, 0, a), Error);
    CHECK_THROWS_AS(acc.accumulateWindow(-1, 0, a), Error);
}

TEST_CASE("fusion of identical masks is the mask and stays within observed bounds") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<float> u(0, 1);
    ProbMask m(16, 16);
    for (float& v : m.data()) v = u(rng);
    FusionAccumulator acc(16, 16);
    for (int k = 0; k < 5; ++k) acc.accumulateWindow(0, 0, m);
    const ProbMask f = acc.finalize();
    for (std::size_t i = 0; i < m.data().size(); ++i) CHECK(std::abs(f.data()[i] - m.data()[i]) <= 1e-6);

    FusionAccumulator mixed(8, 8);
    std::vector<ProbMask> obs;
    for (int k = 0; k < 4; ++k) {
        ProbMask w(8, 8);
        for (float& v : w.data()) v = u(rng);
        mixed.accumulateWindow(0, 0, w);
        obs.push_back(w);
    }
    const ProbMask fm = mixed.finalize();
    for (std::size_t i = 0; i < fm.data().size(); ++i) {
        float lo = 1, hi = 0;
        for (const auto& w : obs) {
            lo = std::min(lo, w.data()[i]);
            hi = std::max(hi, w.data()[i]);
        }
        CHECK(fm.data()[i] >= lo - 1e-6f);
        CHECK(fm.data()[i] <= hi + 1e-6f);
    }
}

TEST_CASE("merged and banded accumulation equal sequential accumulation") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<float> u(0, 1);
    std::vector<ProbMask> windows;
    for (int k = 0; k < 4; ++k) {
        ProbMask w(6, 6);
        for (float& v : w.data()) v = u(rng);
        windows.push_back(w);
    }
    const int ox[] = {0, 4, 0, 4}, oy[] = {0, 0, 4, 4};
    FusionAccumulator seq(10, 10), left(10, 10), right(10, 10), banded(10, 10);
    for (int k = 0; k < 4; ++k) seq.accumulateWindow(ox[k], oy[k], windows[k]);
    for (int k = 0; k < 2; ++k) left.accumulateWindow(ox[k], oy[k], windows[k]);
    for (int k = 2; k < 4; ++k) right.accumulateWindow(ox[k], oy[k], windows[k]);
    left.merge(right);
    for (int band = 0; band < 3; ++band) {
        for (int k = 0; k < 4; ++k) banded.accumulateWindow(ox[k], oy[k], windows[k], band * 4, std::min(10, band * 4 + 4));
    }
    const ProbMask a = left.finalize(), b = seq.finalize();
    for (std::size_t i = 0; i < a.data().size(); ++i) CHECK(a.data()[i] == doctest::Approx(b.data()[i]).epsilon(1e-12));
    CHECK(banded.finalize() == seq.finalize());
}
