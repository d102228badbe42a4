#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "fixtures.hpp"
#include "gradcheck.hpp"
#include "roadgraph/error.hpp"
#include "roadgraph/toponet.hpp"

using namespace roadgraph;
using Eigen::MatrixXd;

namespace {

using fixture::randomFeatures;
using fixture::randomParams;
using fixture::randomVertices;

std::filesystem::path tempDir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("roadgraph_topo_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("sample construction") {
    ExtractionConfig cfg;
    SUBCASE("isolated vertex") {
        const std::vector<Point> v{{0, 0}, {200, 200}};
        const TopoSample s = buildSample(v, 0, cfg);
        CHECK(s.slotCount() == 16);
        CHECK(s.validCount() == 0);
    }
    SUBCASE("three neighbours") {
        const std::vector<Point> v{{0, 0}, {10, 0}, {0, 20}, {30, 30}, {100, 0}};
        const TopoSample s = buildSample(v, 0, cfg);
        CHECK(s.validCount() == 3);
        CHECK(s.targets[0] == 1);
        CHECK(s.targets[1] == 2);
        CHECK(s.targets[2] == 3);
        CHECK(s.offsets[2] == Point{30, 30});
        for (std::size_t k = 3; k < 16; ++k) CHECK(s.valid[k] == 0);
    }
    SUBCASE("the nearest sixteen of twenty, ties by index") {
        std::mt19937_64 rng(1);
        std::vector<Point> v{{32, 32}};
        std::uniform_real_distribution<double> u(0, 64);
        for (int i = 0; i < 20; ++i) v.push_back({u(rng), u(rng)});
        v.push_back(v[5]);  // exact tie with vertex 5
        const TopoSample s = buildSample(v, 0, cfg);
        std::vector<std::pair<double, std::size_t>> ref;
        for (std::size_t j = 1; j < v.size(); ++j) ref.push_back({distanceSquared(v[j], v[0]), j});
        std::sort(ref.begin(), ref.end());
        CHECK(s.validCount() == 16);
        for (std::size_t k = 0; k < 16; ++k) CHECK(s.targets[k] == ref[k].second);
    }
    SUBCASE("radius boundary is inclusive") {
        const std::vector<Point> v{{0, 0}, {64, 0}, {64.001, 0}};
        CHECK(buildSample(v, 0, cfg).validCount() == 1);
    }
}

TEST_CASE("forward pass semantics") {
    std::mt19937_64 rng(5);
    TopoNetConfig net;
    net.featureDim = 8;
    net.heads = 2;
    net.layers = 2;
    const FeatureMap f = randomFeatures(rng, 8, 8);
    const auto verts = randomVertices(rng, 30, 127);
    ExtractionConfig cfg;
    cfg.neighborRadius = 60;

    SUBCASE("all-zero parameters give one half") {
        const TopoNetParams zero = TopoNetParams::zeros(net);
        const TopoSample s = buildSample(verts, 0, cfg);
        const auto p = forward(zero, f, verts, s);
        for (std::size_t k = 0; k < s.slotCount(); ++k) CHECK(p[k] == doctest::Approx(0.5));
    }
    SUBCASE("invalid slots report the head bias") {
        TopoNetParams params = randomParams(net, 3);
        const std::vector<Point> lone{{10, 10}, {120, 120}};
        const auto p = forward(params, f, lone, buildSample(lone, 0, cfg));
        for (double v : p) CHECK(v == doctest::Approx(1.0 / (1.0 + std::exp(-params.headBias(0)))));
    }
    SUBCASE("one valid slot is plain single-token self attention") {
        const TopoNetParams params = randomParams(net, 4);
        const std::vector<Point> pair{{40, 40}, {60, 50}};
        const TopoSample s = buildSample(pair, 0, cfg);
        REQUIRE(s.validCount() == 1);
        const TopoInput in = assembleInput(net, f, pair, s);
        const double logit = forwardLogits(params, in.rows)(0);
        CHECK(forward(params, f, pair, s)[0] == doctest::Approx(1.0 / (1.0 + std::exp(-logit))).epsilon(1e-12));
    }
    SUBCASE("vertices outside the window are rejected") {
        const TopoNetParams params = randomParams(net, 4);
        const std::vector<Point> out{{40, 120}, {40, 130}};
        CHECK_THROWS_AS(forward(params, f, out, buildSample(out, 0, cfg)), Error);
    }
}

TEST_CASE("binary cross entropy") {
    const std::vector<std::uint8_t> one{1}, zero{0};
    CHECK(bceLoss(std::vector<double>{0.5}, one, one) == doctest::Approx(std::log(2.0)));
    CHECK(bceLoss(std::vector<double>{1.0}, one, one) == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(bceLoss(std::vector<double>{0.0}, zero, one) < 1e-6);
    CHECK(bceLoss(std::vector<double>{0.3}, one, zero) == 0.0);
    const std::vector<double> p{0.2, 0.9, 0.4, 0.6};
    const std::vector<std::uint8_t> y{0, 1, 1, 0}, valid{1, 0, 1, 0};
    CHECK(bceLoss(p, y, valid) == doctest::Approx(bceLoss(std::vector<double>{0.2, 0.4}, std::vector<std::uint8_t>{0, 1},
                                                          std::vector<std::uint8_t>{1, 1})));
}

TEST_CASE("gradients match central differences") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 3; ++trial) {
        TopoNetConfig net;
        net.featureDim = 8;
        net.heads = trial == 2 ? 1 : 2;
        net.layers = 2;
        const TopoNetParams params = randomParams(net, 40 + trial);
        const int tokens = 1 + trial * 3;
        std::normal_distribution<double> n(0, 1);
        MatrixXd rows(tokens, net.inputDim());
        for (Eigen::Index i = 0; i < rows.size(); ++i) rows.data()[i] = n(rng);
        std::vector<double> labels(tokens);
        for (double& l : labels) l = static_cast<double>(rng() % 2);
        const auto r = gradcheck::run(params, rows, labels);
        INFO(r.worst);
        CHECK(r.maxRelError < 1e-3);
    }
}

TEST_CASE("gradient corner cases") {
    TopoNetConfig net;
    net.featureDim = 8;
    net.heads = 2;
    net.layers = 1;
    const TopoNetParams params = randomParams(net, 9);
    SUBCASE("no valid rows give zero loss and gradient") {
        double loss = -1;
        const TopoNetParams g = backward(params, MatrixXd(0, net.inputDim()), {}, &loss);
        CHECK(loss == 0.0);
        g.forEachTensor([](const std::string&, const auto& t) { CHECK(t.isZero(0.0)); });
    }
    SUBCASE("saturated correct outputs give tiny gradients") {
        TopoNetParams sat = params;
        sat.headBias(0) = 40.0;
        MatrixXd rows = MatrixXd::Random(3, net.inputDim());
        const std::vector<double> labels{1, 1, 1};
        const TopoNetParams g = backward(sat, rows, labels);
        g.forEachTensor([](const std::string&, const auto& t) { CHECK(t.cwiseAbs().maxCoeff() < 1e-9); });
    }
}

TEST_CASE("masking and permutation") {
    std::mt19937_64 rng(23);
    TopoNetConfig net;
    net.featureDim = 8;
    net.heads = 2;
    net.layers = 3;
    const TopoNetParams params = randomParams(net, 31);
    const FeatureMap f = randomFeatures(rng, 8, 8);
    ExtractionConfig cfg;
    for (int trial = 0; trial < 10; ++trial) {
        const auto verts = randomVertices(rng, 25, 127);
        TopoSample s = buildSample(verts, trial, cfg);
        if (s.validCount() < 2) continue;
        const auto base = forward(params, f, verts, s);

        TopoSample junk = s;
        for (std::size_t k = 0; k < junk.slotCount(); ++k) {
            if (!junk.valid[k]) {
                junk.targets[k] = rng() % verts.size();
                junk.offsets[k] = {double(rng() % 50), -3.0};
            }
        }
        const auto pj = forward(params, f, verts, junk);
        for (std::size_t k = 0; k < s.slotCount(); ++k) {
            if (s.valid[k]) CHECK(std::abs(pj[k] - base[k]) <= 1e-6);
        }

        const std::size_t n = s.validCount();
        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        std::shuffle(perm.begin(), perm.end(), rng);
        TopoSample ps = s;
        for (std::size_t k = 0; k < n; ++k) {
            ps.targets[k] = s.targets[perm[k]];
            ps.offsets[k] = s.offsets[perm[k]];
        }
        const auto pp = forward(params, f, verts, ps);
        for (std::size_t k = 0; k < n; ++k) CHECK(std::abs(pp[k] - base[perm[k]]) <= 1e-6);
    }
}

TEST_CASE("training") {
    std::mt19937_64 rng(3);
    TopoNetConfig net;
    net.featureDim = 8;
    net.heads = 2;
    net.layers = 2;
    TrainingPatch patch;
    patch.features = randomFeatures(rng, 8, 8);
    patch.vertices = randomVertices(rng, 20, 127);
    ExtractionConfig cfg;
    TopoSample s = buildSample(patch.vertices, 0, cfg);
    REQUIRE(s.validCount() >= 2);
    s.labels.assign(s.slotCount(), 0);
    for (std::size_t k = 0; k < s.slotCount(); k += 2) s.labels[k] = 1;
    patch.samples = {s};
    const std::vector<TrainingPatch> data{patch};

    TrainOptions opts;
    opts.net = net;
    opts.steps = 500;
    opts.batchSize = 4;
    opts.seed = 12;

    SUBCASE("a single repeated sample is memorised") {
        const TrainResult r = trainTopoNet(data, opts);
        CHECK(r.lossHistory.size() == 500);
        CHECK(r.lossHistory.back() < 0.01);
    }
    SUBCASE("same seed reproduces the loss history for any thread count") {
        opts.steps = 40;
        const TrainResult a = trainTopoNet(data, opts);
        opts.threads = 3;
        const TrainResult b = trainTopoNet(data, opts);
        CHECK(a.lossHistory == b.lossHistory);
        CHECK(a.params == b.params);
    }
    SUBCASE("zero learning rate leaves parameters alone") {
        opts.steps = 10;
        opts.learningRate = 0.0;
        const TopoNetParams init = TopoNetParams::initialize(net, 5);
        CHECK(trainTopoNet(data, opts, &init).params == init);
    }
    SUBCASE("unlabelled samples are refused") {
        std::vector<TrainingPatch> bad = data;
        bad[0].samples[0].labels.clear();
        CHECK_THROWS_AS(trainTopoNet(bad, opts), Error);
    }
}

TEST_CASE("parameter files") {
    const auto dir = tempDir("params");
    TopoNetConfig net;
    net.featureDim = 8;
    net.heads = 2;
    net.layers = 2;
    const TopoNetParams p = randomParams(net, 77);
    saveParams(dir / "p.bin", p);
    CHECK(loadParams(dir / "p.bin") == p);
    CHECK(loadParams(dir / "p.bin", &net) == p);

    TopoNetConfig other = net;
    other.featureDim = 16;
    try {
        loadParams(dir / "p.bin", &other);
        FAIL("expected a shape error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Shape);
        CHECK(std::string(e.what()).find("input.weight") != std::string::npos);
    }

    const auto size = std::filesystem::file_size(dir / "p.bin");
    std::filesystem::copy_file(dir / "p.bin", dir / "short.bin");
    std::filesystem::resize_file(dir / "short.bin", size - 100);
    try {
        loadParams(dir / "short.bin");
        FAIL("expected a format error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Format);
        CHECK(std::string(e.what()).find("head") != std::string::npos);
    }
    CHECK_THROWS_AS(loadParams(dir / "missing.bin"), Error);
}
