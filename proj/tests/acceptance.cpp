// Acceptance run: one PASS/FAIL line per criterion, exit status 0 iff all pass.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include "fixtures.hpp"
#include "gradcheck.hpp"
#include "oracles.hpp"
#include "roadgraph/error.hpp"
#include "roadgraph/inference.hpp"
#include "roadgraph/labelgen.hpp"
#include "roadgraph/metrics.hpp"
#include "roadgraph/nms.hpp"
#include "roadgraph/parallel.hpp"
#include "roadgraph/pipeline.hpp"
#include "roadgraph/synth.hpp"
#include "roadgraph/toponet.hpp"

using namespace roadgraph;
using Clock = std::chrono::steady_clock;

namespace {

struct Settings {
    int threads{1};
    int steps{8000};
    int batch{32};
    std::string saveParams;
    std::string loadParams;
    std::vector<int> only;
};

struct Outcome {
    bool pass{false};
    std::string detail;
};

double secondsSince(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string num(double v, int precision = 3) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(precision) << v;
    return s.str();
}

std::vector<Point> sorted(std::vector<Point> v) {
    std::sort(v.begin(), v.end(), [](Point a, Point b) { return a.x != b.x ? a.x < b.x : a.y < b.y; });
    return v;
}

// ---------------------------------------------------------------------------

ProbMask randomMask(std::mt19937_64& rng, int size) {
    ProbMask m(size, size);
    std::uniform_real_distribution<double> u(0, 1);
    const bool quantized = rng() % 2 == 0;  // coarse levels force score ties
    for (int c = 0; c < 2; ++c) {
        const int blobs = 1 + static_cast<int>(rng() % 6);
        std::vector<std::array<double, 4>> b(blobs);
        for (auto& x : b) x = {u(rng) * size, u(rng) * size, 2 + 8 * u(rng), 0.5 + 0.5 * u(rng)};
        for (int y = 0; y < size; ++y) {
            for (int x = 0; x < size; ++x) {
                double v = 0.25 * u(rng);
                for (const auto& [bx, by, s, a] : b) {
                    v += a * std::exp(-((x - bx) * (x - bx) + (y - by) * (y - by)) / (2 * s * s));
                }
                v = std::clamp(v, 0.0, 1.0);
                if (quantized) v = std::round(v * 8) / 8;
                m.at(x, y, c) = static_cast<float>(v);
            }
        }
    }
    return m;
}

Outcome criterion1() {
    std::mt19937_64 rng(101);
    int mismatches = 0;
    std::size_t vertices = 0;
    const double thresholds[] = {0.3, 0.5, 0.7};
    const double radii[] = {4.0, 8.0};
    for (int i = 0; i < 100; ++i) {
        const ProbMask m = randomMask(rng, 64);
        ExtractionConfig cfg;
        cfg.threshold = thresholds[rng() % 3];
        cfg.nmsRadius = radii[rng() % 2];
        const auto got = sorted(extractVertices(m, cfg).vertices);
        const auto want = sorted(oracle::extract(m, cfg.threshold, cfg.nmsRadius));
        vertices += want.size();
        if (got != want) ++mismatches;
    }
    return {mismatches == 0, "100 masks, " + std::to_string(vertices) + " oracle vertices, " +
                                 std::to_string(mismatches) + " mismatching masks"};
}

Outcome criterion2() {
    std::mt19937_64 rng(202);
    ExtractionConfig cfg;
    int graphs = 0, mismatches = 0;
    std::size_t queries = 0;
    while (graphs < 200) {
        const int n = 3 + static_cast<int>(rng() % 10);
        const RoadGraph g = oracle::randomGraph(rng, n, static_cast<int>(rng() % 4), 96.0);
        const RoadGraph sub = subdivideGraph(g, 2.0 + static_cast<double>(rng() % 7));
        if (sub.vertices.size() > 200 || sub.edges.empty()) continue;
        ++graphs;
        const EmulatedVertices ev = emulateVertexPrediction(sub, cfg, rng());
        for (std::size_t s = 0; s < ev.positions.size(); ++s) {
            std::vector<std::size_t> targets;
            for (std::size_t t = 0; t < ev.positions.size(); ++t) {
                if (t != s && distance(ev.positions[s], ev.positions[t]) <= cfg.neighborRadius) targets.push_back(t);
            }
            if (targets.empty()) continue;
            ++queries;
            if (connectivityLabels(sub, ev, s, targets, cfg.neighborRadius) !=
                oracle::connectivity(sub, ev.anchors, s, targets, cfg.neighborRadius)) {
                ++mismatches;
            }
        }
    }
    return {mismatches == 0, "200 graphs, " + std::to_string(queries) + " sources, " + std::to_string(mismatches) +
                                 " mismatches"};
}

Outcome criterion3() {
    std::mt19937_64 rng(303);
    const int headChoices[] = {1, 2, 4, 8, 4};
    double worst = 0, worstCentral = 0;
    std::string where;
    std::size_t checked = 0, oneSided = 0, bothSides = 0;
    for (int trial = 0; trial < 5; ++trial) {
        TopoNetConfig net;
        net.featureDim = 32;
        net.heads = headChoices[trial];
        net.layers = 3;
        const TopoNetParams params = fixture::randomParams(net, 3000 + static_cast<std::uint64_t>(trial));
        const FeatureMap f = fixture::randomFeatures(rng, 16, 32);
        const auto verts = fixture::randomVertices(rng, 40, 255);
        ExtractionConfig cfg;
        cfg.maxNeighbors = 16;
        cfg.neighborRadius = 90 + 40 * trial;  // from partially to fully occupied slots
        const TopoSample s = buildSample(verts, static_cast<std::size_t>(trial), cfg);
        const TopoInput in = assembleInput(net, f, verts, s);
        std::vector<double> labels(static_cast<std::size_t>(in.rows.rows()));
        for (double& l : labels) l = static_cast<double>(rng() % 2);
        const auto r = gradcheck::run(params, in.rows, labels, 1e-4);
        checked += r.checked;
        oneSided += r.oneSided;
        bothSides += r.bothSides;
        worstCentral = std::max(worstCentral, r.maxCentralRelError);
        if (r.maxRelError > worst) {
            worst = r.maxRelError;
            where = "heads " + std::to_string(net.heads) + ", " + std::to_string(in.rows.rows()) + " valid slots, " +
                    r.worst;
        }
    }
    return {worst < 1e-3, "5 configurations, " + std::to_string(checked) + " parameters, max relative error " +
                              num(worst * 1e6, 3) + "e-6 (" + where + "); " + std::to_string(oneSided) +
                              " used a one-sided difference beside a ReLU kink, " + std::to_string(bothSides) +
                              " had kinks on both sides; plain central worst " + num(worstCentral, 6)};
}

RoadGraph withoutEdge(RoadGraph g, std::size_t e) {
    g.edges.erase(g.edges.begin() + static_cast<std::ptrdiff_t>(e));
    return g;
}

Outcome criterion4(int threads) {
    std::mt19937_64 rng(404);
    double worstIdentity = 0;
    int bridgeCases = 0, bridgeViolations = 0, spurViolations = 0;
    for (int i = 0; i < 20; ++i) {
        const SceneStyle style = static_cast<SceneStyle>(i % 3);
        const RoadGraph g = generateScene({384, 384, style, 1.0, 4000 + static_cast<std::uint64_t>(i)});
        TopoParams tp;
        tp.seed = static_cast<std::uint64_t>(i);
        tp.threads = threads;
        AplsParams ap;
        ap.seed = static_cast<std::uint64_t>(i);
        ap.threads = threads;
        const TopoScore self = toposcore(g, g, tp);
        const AplsScore selfApls = apls(g, g, ap);
        worstIdentity = std::max({worstIdentity, std::abs(1 - self.precision), std::abs(1 - self.recall),
                                  std::abs(1 - self.f1), std::abs(1 - selfApls.apls)});

        const auto bridges = oracle::bridges(g);
        RoadGraph damaged = g;
        if (!bridges.empty()) {
            ++bridgeCases;
            damaged = withoutEdge(g, bridges[rng() % bridges.size()]);
            if (apls(g, damaged, ap).apls > selfApls.apls + 1e-12) ++bridgeViolations;
        }

        // A spur well away from every road: its marbles can never match.
        RoadGraph spur = g;
        const double y = -200.0 - static_cast<double>(rng() % 100);
        spur.vertices.push_back({50.0, y});
        spur.vertices.push_back({250.0, y});
        spur.edges.push_back({g.vertices.size(), g.vertices.size() + 1});
        if (toposcore(g, spur, tp).precision > self.precision + 1e-12) ++spurViolations;
    }
    const bool pass = worstIdentity <= 1e-6 && bridgeViolations == 0 && spurViolations == 0;
    return {pass, "20 graphs, identity deviation " + num(worstIdentity, 9) + ", bridge deletions " +
                      std::to_string(bridgeCases) + " (" + std::to_string(bridgeViolations) +
                      " increases), spur precision increases " + std::to_string(spurViolations)};
}

Outcome criterion5() {
    std::mt19937_64 rng(505);
    TopoNetConfig net;
    const TopoNetParams params = fixture::randomParams(net, 55);
    ExtractionConfig cfg;
    double maskDev = 0, permDev = 0;
    int cases = 0;
    while (cases < 50) {
        const FeatureMap f = fixture::randomFeatures(rng, 16, 32);
        const auto verts = fixture::randomVertices(rng, 30 + static_cast<int>(rng() % 40), 255);
        const TopoSample s = buildSample(verts, rng() % verts.size(), cfg);
        if (s.validCount() < 2 || s.validCount() == s.slotCount()) continue;
        ++cases;
        const auto base = forward(params, f, verts, s);

        TopoSample junk = s;
        std::uniform_real_distribution<double> u(-500, 500);
        for (std::size_t k = 0; k < junk.slotCount(); ++k) {
            if (!junk.valid[k]) {
                junk.targets[k] = rng() % verts.size();
                junk.offsets[k] = {u(rng), u(rng)};
            }
        }
        const auto pj = forward(params, f, verts, junk);

        // Shuffle the whole slot array, valid and invalid slots alike.
        std::vector<std::size_t> perm(s.slotCount());
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        std::shuffle(perm.begin(), perm.end(), rng);
        TopoSample ps = s;
        for (std::size_t k = 0; k < perm.size(); ++k) {
            ps.targets[k] = s.targets[perm[k]];
            ps.offsets[k] = s.offsets[perm[k]];
            ps.valid[k] = s.valid[perm[k]];
        }
        const auto pp = forward(params, f, verts, ps);
        for (std::size_t k = 0; k < s.slotCount(); ++k) {
            if (s.valid[k]) maskDev = std::max(maskDev, std::abs(pj[k] - base[k]));
            if (ps.valid[k]) permDev = std::max(permDev, std::abs(pp[k] - base[perm[k]]));
        }
    }
    return {maskDev <= 1e-6 && permDev <= 1e-6, "50 cases, invalid-slot deviation " + num(maskDev * 1e9, 3) +
                                                    "e-9, permutation deviation " + num(permDev * 1e9, 3) + "e-9"};
}

// ---------------------------------------------------------------------------
// Synthetic closure

constexpr double kNoise = 0.05;

struct Scene {
    RoadGraph graph;
    ProbMask mask;
};

Scene makeScene(int size, SceneStyle style, std::uint64_t seed) {
    Scene s;
    s.graph = generateScene({size, size, style, 1.0, seed});
    s.mask = noisyMasks(s.graph, size, size, kNoise, seed ^ 0x9e3779b97f4a7c15ULL);
    return s;
}

WindowSource cropSource(const ProbMask& full, const WindowGrid& grid, const EncoderOptions& enc) {
    WindowSource src;
    src.mask = [&full, grid](int ix, int iy) {
        return full.crop(grid.originX(ix), grid.originY(iy), grid.windowSize, grid.windowSize);
    };
    src.features = [&full, grid, enc](int ix, int iy) {
        return analyticEncoder(full.crop(grid.originX(ix), grid.originY(iy), grid.windowSize, grid.windowSize), enc);
    };
    return src;
}

struct Closure {
    TopoNetParams params;
    ExtractionConfig cfg;
    std::vector<Scene> heldOut;
    std::vector<double> apls4;  // per held-out scene, 4x4 grid
    double seconds4{0};
};

struct Counts {
    std::size_t correct{0}, total{0};
};

/// Scores every valid slot of the patches; `labels` collects the matching labels.
std::vector<double> slotScores(const TopoNetParams& params, const std::vector<TrainingPatch>& patches,
                               std::vector<std::uint8_t>& labels) {
    std::vector<double> scores;
    for (const TrainingPatch& p : patches) {
        for (const TopoSample& s : p.samples) {
            const auto prob = forward(params, p.features, p.vertices, s);
            for (std::size_t k = 0; k < s.slotCount(); ++k) {
                if (!s.valid[k]) continue;
                scores.push_back(prob[k]);
                labels.push_back(s.labels[k]);
            }
        }
    }
    return scores;
}

Outcome criterion6(const Settings& st, Closure& out) {
    const auto t0 = Clock::now();
    ExtractionConfig cfg;
    const EncoderOptions enc;
    const int threads = st.threads;

    // Training data: rotated 256-px crops of 50 noisy scenes, alternating styles.
    constexpr int kTrainScenes = 50;
    std::vector<std::vector<TrainingPatch>> perScene(kTrainScenes);
    ScenePatchOptions po;
    parallelFor(kTrainScenes, threads, [&](std::size_t i) {
        const SceneStyle style = i % 2 ? SceneStyle::Radial : SceneStyle::Grid;
        const Scene s = makeScene(512, style, 10000 + i);
        perScene[i] = sceneTrainingPatches(s.graph, s.mask, po, cfg, enc, 20000 + i);
    });
    std::vector<TrainingPatch> patches;
    for (auto& v : perScene) std::move(v.begin(), v.end(), std::back_inserter(patches));
    perScene.clear();

    TrainOptions to;
    to.steps = st.steps;
    to.batchSize = st.batch;
    to.learningRate = 1e-3;
    to.seed = 7;
    to.threads = threads;
    to.logEvery = std::max(1, st.steps / 10);
    const auto tTrain = Clock::now();
    if (!st.loadParams.empty()) {
        out.params = loadParams(st.loadParams, &to.net);
    } else {
        to.progress = [](int step, double loss) {
            std::cerr << "  train step " << step << " loss " << num(loss, 4) << '\n';
        };
        out.params = trainTopoNet(patches, to).params;
        if (!st.saveParams.empty()) saveParams(st.saveParams, out.params);
    }
    const double trainSeconds = secondsSince(tTrain);
    patches.clear();

    // Edge threshold: best F1 on separate validation scenes.
    std::vector<TrainingPatch> validation;
    for (std::uint64_t i = 0; i < 6; ++i) {
        const Scene s = makeScene(512, i % 2 ? SceneStyle::Radial : SceneStyle::Grid, 30000 + i);
        const WindowGrid grid = planWindows(512, 512, 256, 2, 2);
        for (int iy = 0; iy < 2; ++iy) {
            for (int ix = 0; ix < 2; ++ix) {
                const int ox = grid.originX(ix), oy = grid.originY(iy);
                validation.push_back(makeTrainingPatch(s.mask.crop(ox, oy, 256, 256),
                                                       windowGraph(s.graph, ox, oy, 256, 256), cfg, enc,
                                                       31000 + i * 4 + static_cast<std::uint64_t>(iy * 2 + ix)));
            }
        }
    }
    std::vector<std::uint8_t> valLabels;
    const auto valScores = slotScores(out.params, validation, valLabels);
    std::vector<double> candidates;
    for (int k = 1; k < 20; ++k) candidates.push_back(k / 20.0);
    cfg.edgeThreshold = sweepThreshold(valScores, valLabels, candidates).best;
    out.cfg = cfg;

    // Held-out scenes: slot accuracy on their 4x4 windows, then full inference.
    Counts counts;
    double topoF1 = 0, aplsSum = 0;
    for (std::uint64_t i = 0; i < 10; ++i) {
        out.heldOut.push_back(makeScene(512, i % 2 ? SceneStyle::Radial : SceneStyle::Grid, 50000 + i));
        const Scene& s = out.heldOut.back();
        const WindowGrid grid = planWindows(512, 512, 256, 4, 4);
        std::vector<TrainingPatch> windows;
        for (int iy = 0; iy < 4; ++iy) {
            for (int ix = 0; ix < 4; ++ix) {
                const int ox = grid.originX(ix), oy = grid.originY(iy);
                windows.push_back(makeTrainingPatch(s.mask.crop(ox, oy, 256, 256),
                                                    windowGraph(s.graph, ox, oy, 256, 256), cfg, enc,
                                                    51000 + i * 16 + static_cast<std::uint64_t>(iy * 4 + ix)));
            }
        }
        std::vector<std::uint8_t> labels;
        const auto scores = slotScores(out.params, windows, labels);
        for (std::size_t k = 0; k < scores.size(); ++k) {
            counts.correct += (scores[k] >= cfg.edgeThreshold) == (labels[k] != 0);
            ++counts.total;
        }

        const auto tInfer = Clock::now();
        const InferenceResult r = inferGraph(grid, cropSource(s.mask, grid, enc), out.params, cfg, threads);
        out.seconds4 += secondsSince(tInfer);
        TopoParams tp;
        tp.seed = i;
        tp.threads = threads;
        AplsParams ap;
        ap.seed = i;
        ap.threads = threads;
        const double f1 = toposcore(s.graph, r.graph, tp).f1;
        const double a = apls(s.graph, r.graph, ap).apls;
        std::cerr << "  held-out scene " << i << ": TOPO F1 " << num(f1) << ", APLS " << num(a) << '\n';
        topoF1 += f1;
        aplsSum += a;
        out.apls4.push_back(a);
    }
    topoF1 /= 10;
    aplsSum /= 10;
    const double accuracy = static_cast<double>(counts.correct) / static_cast<double>(counts.total);
    const double seconds = secondsSince(t0);
    const bool pass = accuracy >= 0.95 && aplsSum >= 0.90 && topoF1 >= 0.90 && seconds < 900;
    return {pass, "edge accuracy " + num(accuracy) + " over " + std::to_string(counts.total) + " slots, APLS " +
                      num(aplsSum) + ", TOPO F1 " + num(topoF1) + ", edge threshold " + num(cfg.edgeThreshold, 2) +
                      ", " + std::to_string(st.steps) + " steps" +
                      (st.loadParams.empty() ? " trained in " + num(trainSeconds, 1) + " s" : " (loaded params)")};
}

Outcome criterion7(const Closure& c) {
    const Scene s = makeScene(2048, SceneStyle::Mixed, 70000);
    const WindowGrid grid = planWindows(2048, 2048, 512, 16, 16);
    const EncoderOptions enc;
    const auto t1 = Clock::now();
    const InferenceResult one = inferGraph(grid, cropSource(s.mask, grid, enc), c.params, c.cfg, 1);
    const double seconds1 = secondsSince(t1);
    const auto t8 = Clock::now();
    const InferenceResult eight = inferGraph(grid, cropSource(s.mask, grid, enc), c.params, c.cfg, 8);
    const double seconds8 = secondsSince(t8);

    bool same = one.graph == eight.graph && one.fusedMask == eight.fusedMask &&
                one.scores.size() == eight.scores.size();
    double scoreDev = 0;
    for (const auto& [key, e] : one.scores.entries()) {
        const double other = eight.scores.mean(key.first, key.second);
        if (other < 0) same = false;
        scoreDev = std::max(scoreDev, std::abs(other - e.sum / e.count));
    }
    same = same && scoreDev <= 1e-12;
    const unsigned cores = std::thread::hardware_concurrency();
    const double ratio = seconds8 / seconds1;
    std::string speed = "8-thread/1-thread time " + num(ratio, 2) + " (" + num(seconds1, 1) + " s vs " +
                        num(seconds8, 1) + " s";
    bool pass = same;
    if (cores >= 8) {
        pass = pass && ratio <= 0.5;
        speed += ", required <= 0.5)";
    } else {
        speed += ", report only: host has " + std::to_string(cores) + " core(s))";
    }
    return {pass, std::string(same ? "identical" : "DIFFERENT") + " graphs, fused masks and edge scores (" +
                      std::to_string(one.graph.vertices.size()) + " vertices, " +
                      std::to_string(one.graph.edges.size()) + " edges, " + std::to_string(one.stats.queries) +
                      " queries); " + speed};
}

Outcome criterion8(const Settings& st, const Closure& c) {
    const EncoderOptions enc;
    const WindowGrid grid = planWindows(512, 512, 256, 16, 16);
    double seconds16 = 0, apls16 = 0;
    for (std::size_t i = 0; i < c.heldOut.size(); ++i) {
        const Scene& s = c.heldOut[i];
        const auto t0 = Clock::now();
        const InferenceResult r = inferGraph(grid, cropSource(s.mask, grid, enc), c.params, c.cfg, st.threads);
        seconds16 += secondsSince(t0);
        AplsParams ap;
        ap.seed = i;
        ap.threads = st.threads;
        apls16 += apls(s.graph, r.graph, ap).apls;
    }
    apls16 /= static_cast<double>(c.heldOut.size());
    const double apls4 = std::accumulate(c.apls4.begin(), c.apls4.end(), 0.0) / static_cast<double>(c.apls4.size());
    const double drop = apls16 - apls4;
    const bool pass = c.seconds4 < seconds16 && drop <= 0.03;
    return {pass, "4x4: APLS " + num(apls4) + " in " + num(c.seconds4, 2) + " s; 16x16: APLS " + num(apls16) + " in " +
                      num(seconds16, 2) + " s; drop " + num(drop) + " (limit 0.030), speed-up " +
                      num(seconds16 / c.seconds4, 1) + "x"};
}

}  // namespace

int main(int argc, char** argv) {
    Settings st;
    st.threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    CLI::App app{"acceptance criteria"};
    app.add_option("--threads", st.threads, "worker threads for the closure run")->capture_default_str();
    app.add_option("--steps", st.steps, "training steps for the closure run")->capture_default_str();
    app.add_option("--batch", st.batch, "training batch size")->capture_default_str();
    app.add_option("--save-params", st.saveParams, "write the trained decoder here");
    app.add_option("--load-params", st.loadParams, "skip training and use this decoder");
    app.add_option("--only", st.only, "run only these criteria (1-8)");
    CLI11_PARSE(app, argc, argv);

    auto wanted = [&](int k) { return st.only.empty() || std::count(st.only.begin(), st.only.end(), k) > 0; };
    Closure closure;
    bool closureReady = false;
    int failures = 0;

    auto report = [&](int k, const std::string& name, double limitSeconds, const std::function<Outcome()>& fn) {
        if (!wanted(k)) return;
        const auto t0 = Clock::now();
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        const double seconds = secondsSince(t0);
        const bool inTime = limitSeconds <= 0 || seconds < limitSeconds;
        const bool pass = o.pass && inTime;
        if (!pass) ++failures;
        std::cout << "C" << k << ' ' << (pass ? "PASS" : "FAIL") << "  " << name << ": " << o.detail << "; "
                  << num(seconds, 1) << " s";
        if (limitSeconds > 0) std::cout << " (limit " << num(limitSeconds, 0) << " s)";
        std::cout << std::endl;
    };

    report(1, "NMS oracle equivalence", 10, criterion1);
    report(2, "connectivity-label oracle", 30, criterion2);
    report(3, "gradient check", 60, criterion3);
    report(4, "metric identities", 60, [&] { return criterion4(st.threads); });
    report(5, "masking/permutation invariants", 5, criterion5);
    auto ensureClosure = [&]() -> Outcome {
        Outcome o = criterion6(st, closure);
        closureReady = true;
        return o;
    };
    report(6, "end-to-end synthetic closure", 900, ensureClosure);
    if ((wanted(7) || wanted(8)) && !closureReady) {
        try {
            criterion6(st, closure);
            closureReady = true;
        } catch (const std::exception& e) {
            std::cerr << "closure run failed: " << e.what() << '\n';
        }
    }
    report(7, "fusion and parallelism", 0, [&] {
        return closureReady ? criterion7(closure) : Outcome{false, "no trained decoder"};
    });
    report(8, "speed/accuracy trade-off", 0, [&] {
        return closureReady ? criterion8(st, closure) : Outcome{false, "no trained decoder"};
    });
    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
    return failures == 0 ? 0 : 1;
}
