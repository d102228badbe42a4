#include "roadgraph/cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <ostream>
#include <random>

#include "roadgraph/dataset.hpp"
#include "roadgraph/error.hpp"
#include "roadgraph/inference.hpp"
#include "roadgraph/metrics.hpp"
#include "roadgraph/nms.hpp"
#include "roadgraph/pipeline.hpp"
#include "roadgraph/raster.hpp"
#include "roadgraph/render.hpp"
#include "roadgraph/synth.hpp"
#include "roadgraph/toponet.hpp"

namespace roadgraph {

namespace {

namespace fs = std::filesystem;

struct Common {
    std::uint64_t seed{0};
    int threads{1};
    std::string config;
};

void addCommon(CLI::App* sub, Common& c) {
    sub->add_option("--seed", c.seed, "random seed")->capture_default_str();
    sub->add_option("--threads", c.threads, "worker threads (0 = all cores)")->capture_default_str();
    // Read by expandConfig before parsing; registered here for --help.
    sub->add_option("--config", c.config, "settings file of `key = value` lines (flags given on the command line win)");
}

/// Splices `--key=value` for every line of the subcommand's --config file in
/// right after the subcommand name, so later command-line flags override it.
std::vector<std::string> expandConfig(std::vector<std::string> args, const CLI::App& app) {
    std::size_t sub = 1;
    while (sub < args.size() && !app.get_subcommand_no_throw(args[sub])) ++sub;
    if (sub >= args.size()) return args;
    std::string file;
    for (std::size_t i = sub + 1; i < args.size(); ++i) {
        if (args[i] == "--") break;
        if (args[i] == "--config" && i + 1 < args.size()) file = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0) file = args[i].substr(9);
    }
    if (file.empty()) return args;

    std::ifstream in(file);
    require(static_cast<bool>(in), ErrorCode::Io, "cannot read config file " + file);
    std::vector<std::string> inserted;
    std::string line;
    for (int number = 1; std::getline(in, line); ++number) {
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const auto trim = [](std::string t) {
            const auto b = t.find_first_not_of(" \t\r");
            if (b == std::string::npos) return std::string();
            return t.substr(b, t.find_last_not_of(" \t\r") - b + 1);
        };
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        const std::string key = eq == std::string::npos ? "" : trim(line.substr(0, eq));
        const bool keyOk = !key.empty() && key != "config" &&
                           key.find_first_not_of("abcdefghijklmnopqrstuvwxyz0123456789-") == std::string::npos;
        require(keyOk, ErrorCode::Usage, file + ":" + std::to_string(number) + ": expected `key = value`");
        inserted.push_back("--" + key + "=" + trim(line.substr(eq + 1)));
    }
    args.insert(args.begin() + static_cast<std::ptrdiff_t>(sub) + 1, inserted.begin(), inserted.end());
    return args;
}

void addExtraction(CLI::App* sub, ExtractionConfig& cfg) {
    sub->add_option("--threshold", cfg.threshold, "mask probability threshold t, in [0,1)")->capture_default_str();
    sub->add_option("--nms-radius", cfg.nmsRadius, "vertex NMS radius d_v (pixels)")->capture_default_str();
    sub->add_option("--neighbor-radius", cfg.neighborRadius, "topology query radius R_nbr (pixels)")
        ->capture_default_str();
    sub->add_option("--max-neighbors", cfg.maxNeighbors, "target slots per source N_nbr (count)")
        ->capture_default_str();
    sub->add_option("--edge-threshold", cfg.edgeThreshold, "edge probability threshold, in [0,1]")
        ->capture_default_str();
}

std::string fmt(double v, int precision = 4) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(precision) << v;
    return s.str();
}

// ---------------------------------------------------------------------------

struct SynthArgs {
    Common common;
    std::string out;
    int width{512};
    int height{512};
    std::string style{"grid"};
    double density{1.0};
    double jitter{4.0};
    double dropFraction{0.1};
    double noise{0.05};
    double blur{3.0};
    int window{256};
    int countX{4};
    int countY{4};
    int featureScale{16};
    int channels{32};
};

void runSynth(const SynthArgs& a, std::ostream& out) {
    SceneSpec spec;
    spec.width = a.width;
    spec.height = a.height;
    spec.style = parseSceneStyle(a.style);
    spec.density = a.density;
    spec.seed = a.common.seed;
    spec.jitter = a.jitter;
    spec.dropFraction = a.dropFraction;
    const RoadGraph g = generateScene(spec);
    const ProbMask mask = noisyMasks(g, a.width, a.height, a.noise, a.common.seed + 1, a.blur);
    const WindowGrid grid = planWindows(a.width, a.height, a.window, a.countX, a.countY);
    DatasetMeta meta{a.width, a.height, a.window, a.countX, a.countY, a.featureScale};
    EncoderOptions enc;
    enc.channels = a.channels;
    writeDataset(a.out, mask, meta, enc, &g, a.common.threads);
    saveTensor(fs::path(a.out) / "mask.rgt", mask.toTensor());
    out << "scene: " << g.vertices.size() << " vertices, " << g.edges.size() << " edges, "
        << grid.windowCount() << " windows -> " << a.out << '\n';
}

struct RasterizeArgs {
    Common common;
    std::string graph, out;
    int width{0};
    int height{0};
    double noise{0.0};
    double blur{0.0};
};

void runRasterize(const RasterizeArgs& a, std::ostream& out) {
    require(a.width > 0 && a.height > 0, ErrorCode::Usage, "--width and --height must be positive");
    const RoadGraph g = loadGraph(a.graph);
    const ProbMask mask = (a.noise > 0 || a.blur > 0) ? noisyMasks(g, a.width, a.height, a.noise, a.common.seed, a.blur)
                                                      : rasterizeLabels(g, a.width, a.height);
    saveTensor(a.out, mask.toTensor());
    out << "mask " << a.width << "x" << a.height << " -> " << a.out << '\n';
}

struct ExtractArgs {
    Common common;
    ExtractionConfig cfg;
    std::string mask, out;
};

void runExtract(const ExtractArgs& a, std::ostream& out) {
    const ProbMask mask = ProbMask::fromTensor(loadTensor(a.mask));
    const RoadGraph g = extractVertices(mask, a.cfg);
    saveGraph(a.out, g);
    out << g.vertices.size() << " vertices -> " << a.out << '\n';
}

struct TrainArgs {
    Common common;
    ExtractionConfig cfg;
    std::vector<std::string> data;
    std::string out, init, dump;
    std::string features{"files"};
    bool rotate{false};
    int rounds{1};
    int steps{1000};
    int batch{32};
    double lr{1e-3};
    int heads{4};
    int layers{3};
    int ffnMultiplier{4};
    int logEvery{100};
};

void runTrain(const TrainArgs& a, std::ostream& out) {
    a.cfg.validate();
    require(a.features == "files" || a.features == "analytic", ErrorCode::Usage,
            "--features must be 'files' or 'analytic'");
    require(!a.rotate || a.features == "analytic", ErrorCode::Usage, "--rotate needs --features analytic");
    require(a.rounds >= 1, ErrorCode::Usage, "--rounds must be >= 1");
    std::mt19937_64 rng(a.common.seed);
    std::vector<TrainingPatch> patches;
    bool dumped = false;
    for (const std::string& dir : a.data) {
        const DatasetMeta meta = readMeta(fs::path(dir) / "meta.txt");
        const RoadGraph g = loadGraph(fs::path(dir) / "graph.json");
        const WindowGrid grid = meta.grid();
        EncoderOptions enc;
        enc.scale = meta.featureScale;
        for (int iy = 0; iy < grid.countY; ++iy) {
            for (int ix = 0; ix < grid.countX; ++ix) {
                const RoadGraph wg = windowGraph(g, grid.originX(ix), grid.originY(iy), grid.windowSize, grid.windowSize);
                for (int r = 0; r < a.rounds; ++r) {
                    LabeledPatch labeled;
                    TrainingPatch patch;
                    if (a.features == "files") {
                        patch.features = FeatureMap::fromTensor(loadTensor(windowFile(dir, "feats", ix, iy)), meta.featureScale);
                        enc.channels = patch.features.channels();
                        labeled = makeTopoSamples(wg, patch.features.windowExtent(), a.cfg, rng());
                        patch.vertices = labeled.inputVertices;
                        patch.samples = labeled.samples;
                    } else {
                        PatchBundle bundle{grid.windowSize, grid.windowSize,
                                           ProbMask::fromTensor(loadTensor(windowFile(dir, "masks", ix, iy))),
                                           std::nullopt, wg};
                        if (a.rotate) bundle = augmentPatch(bundle, Rot90{static_cast<int>(rng() % 4)});
                        patch = makeTrainingPatch(*bundle.mask, bundle.graph, a.cfg, enc, rng(), &labeled);
                    }
                    if (!a.dump.empty() && !dumped) {
                        dumpSamples(a.dump, labeled);
                        dumped = true;
                    }
                    patches.push_back(std::move(patch));
                }
            }
        }
    }
    require(!patches.empty(), ErrorCode::Usage, "no training data given (--data)");

    TrainOptions opts;
    opts.net.featureDim = patches.front().features.channels();
    opts.net.heads = a.heads;
    opts.net.layers = a.layers;
    opts.net.ffnMultiplier = a.ffnMultiplier;
    opts.net.offsetScale = a.cfg.neighborRadius;
    opts.learningRate = a.lr;
    opts.steps = a.steps;
    opts.batchSize = a.batch;
    opts.seed = a.common.seed;
    opts.threads = a.common.threads;
    opts.logEvery = a.logEvery;
    opts.progress = [&out](int step, double loss) { out << "step " << step << " loss " << fmt(loss, 6) << '\n'; };
    TopoNetParams init;
    const TopoNetParams* initPtr = nullptr;
    if (!a.init.empty()) {
        init = loadParams(a.init);
        initPtr = &init;
        opts.net = init.config;
    }
    const TrainResult result = trainTopoNet(patches, opts, initPtr);
    saveParams(a.out, result.params);
    out << "trained " << opts.steps << " steps on " << patches.size() << " patches, final loss "
        << fmt(result.lossHistory.empty() ? 0.0 : result.lossHistory.back(), 6) << " -> " << a.out << '\n';
}

struct InferArgs {
    Common common;
    ExtractionConfig cfg;
    std::string data, params, out, fused;
};

void runInfer(const InferArgs& a, std::ostream& out) {
    const DatasetMeta meta = readMeta(fs::path(a.data) / "meta.txt");
    const TopoNetParams params = loadParams(a.params);
    const WindowGrid grid = planWindows(meta.imageWidth, meta.imageHeight, meta.windowSize, meta.countX, meta.countY);
    if (!windowOverlapCovers(grid, a.cfg.neighborRadius)) {
        out << "warning: window overlap is below the neighbour radius; pairs split across windows are never scored\n";
    }
    const auto t0 = std::chrono::steady_clock::now();
    const InferenceResult r = inferGraph(grid, datasetWindowSource(a.data, meta), params, a.cfg, a.common.threads);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    saveGraph(a.out, r.graph);
    if (!a.fused.empty()) saveTensor(a.fused, r.fusedMask.toTensor());
    out << r.graph.vertices.size() << " vertices, " << r.graph.edges.size() << " edges (" << r.stats.scoredPairs
        << " scored pairs, " << r.stats.queries << " queries) in " << fmt(seconds, 2) << " s -> " << a.out << '\n';
}

struct EvalArgs {
    Common common;
    std::string gt, pred, report;
    TopoParams topo;
    AplsParams aplsParams;
};

void runEval(EvalArgs a, std::ostream& out) {
    const RoadGraph gt = loadGraph(a.gt);
    const RoadGraph pred = loadGraph(a.pred);
    a.topo.seed = a.aplsParams.seed = a.common.seed;
    a.topo.threads = a.aplsParams.threads = a.common.threads;
    const TopoScore t = toposcore(gt, pred, a.topo);
    const AplsScore s = apls(gt, pred, a.aplsParams);
    out << "TOPO precision " << fmt(t.precision) << " recall " << fmt(t.recall) << " F1 " << fmt(t.f1) << '\n'
        << "APLS " << fmt(s.apls) << " (gt->pred " << fmt(s.gtToPred) << ", pred->gt " << fmt(s.predToGt) << ")\n";
    if (!a.report.empty()) {
        nlohmann::json j;
        j["topo"] = {{"precision", t.precision}, {"recall", t.recall}, {"f1", t.f1},
                     {"matched_holes", t.matchedHoles}, {"total_holes", t.totalHoles},
                     {"matched_marbles", t.matchedMarbles}, {"total_marbles", t.totalMarbles}};
        j["apls"] = {{"apls", s.apls}, {"gt_to_pred", s.gtToPred}, {"pred_to_gt", s.predToGt}, {"pairs", s.pairs}};
        std::ofstream f(a.report);
        require(static_cast<bool>(f), ErrorCode::Io, "cannot write " + a.report);
        f << j.dump(2) << '\n';
    }
}

struct RenderArgs {
    Common common;
    std::string graph, out, mask;
    int width{0};
    int height{0};
};

void runRender(const RenderArgs& a, std::ostream& out) {
    const RoadGraph g = loadGraph(a.graph);
    RenderOptions o;
    ProbMask mask;
    if (!a.mask.empty()) {
        mask = ProbMask::fromTensor(loadTensor(a.mask));
        o.background = &mask;
        o.width = mask.width();
        o.height = mask.height();
    } else {
        for (const Point& p : g.vertices) {
            o.width = std::max(o.width, static_cast<int>(std::ceil(p.x)) + 1);
            o.height = std::max(o.height, static_cast<int>(std::ceil(p.y)) + 1);
        }
    }
    if (a.width > 0) o.width = a.width;
    if (a.height > 0) o.height = a.height;
    require(o.width > 0 && o.height > 0, ErrorCode::Usage, "cannot infer the image extent; pass --width/--height");
    renderToFile(a.out, g, o);
    out << "rendered " << o.width << "x" << o.height << " -> " << a.out << '\n';
}

}  // namespace

int runCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Road-network graph extraction from probability masks and feature maps", "roadgraph"};
    app.require_subcommand(1);

    SynthArgs synth;
    auto* s = app.add_subcommand("synth", "generate a synthetic scene dataset");
    addCommon(s, synth.common);
    s->add_option("--out", synth.out, "dataset directory")->required();
    s->add_option("--width", synth.width, "image width (pixels)")->capture_default_str();
    s->add_option("--height", synth.height, "image height (pixels)")->capture_default_str();
    s->add_option("--style", synth.style, "grid, radial or mixed")->capture_default_str();
    s->add_option("--density", synth.density, "street density factor (>0)")->capture_default_str();
    s->add_option("--jitter", synth.jitter, "lattice jitter (pixels)")->capture_default_str();
    s->add_option("--drop-fraction", synth.dropFraction, "share of grid edges removed, in [0,1)")->capture_default_str();
    s->add_option("--noise", synth.noise, "mask noise standard deviation (probability units)")->capture_default_str();
    s->add_option("--blur", synth.blur, "mask blur standard deviation (pixels, 0 = none)")->capture_default_str();
    s->add_option("--window", synth.window, "window size (pixels)")->capture_default_str();
    s->add_option("--count-x", synth.countX, "windows along x (count)")->capture_default_str();
    s->add_option("--count-y", synth.countY, "windows along y (count)")->capture_default_str();
    s->add_option("--feature-scale", synth.featureScale, "pixels per feature cell")->capture_default_str();
    s->add_option("--channels", synth.channels, "feature channels D_feat (count)")->capture_default_str();

    RasterizeArgs rast;
    auto* r = app.add_subcommand("rasterize", "rasterize a graph into a two-channel label mask");
    addCommon(r, rast.common);
    r->add_option("--graph", rast.graph, "input graph (JSON)")->required();
    r->add_option("--out", rast.out, "output mask (RGT1)")->required();
    r->add_option("--width", rast.width, "mask width (pixels)")->required();
    r->add_option("--height", rast.height, "mask height (pixels)")->required();
    r->add_option("--noise", rast.noise, "noise standard deviation (probability units)")->capture_default_str();
    r->add_option("--blur", rast.blur, "blur standard deviation (pixels)")->capture_default_str();

    ExtractArgs ext;
    auto* e = app.add_subcommand("extract", "extract vertices from a probability mask");
    addCommon(e, ext.common);
    addExtraction(e, ext.cfg);
    e->add_option("--mask", ext.mask, "input mask (RGT1, H x W x 2)")->required();
    e->add_option("--out", ext.out, "output graph (JSON, vertices only)")->required();

    TrainArgs train;
    auto* t = app.add_subcommand("train-topo", "train the topology decoder on dataset directories");
    addCommon(t, train.common);
    addExtraction(t, train.cfg);
    t->add_option("--data", train.data, "dataset directories (repeatable)")->required();
    t->add_option("--out", train.out, "output parameter file")->required();
    t->add_option("--init", train.init, "parameter file to start from");
    t->add_option("--features", train.features, "'files' (feats/) or 'analytic' (re-encode masks/)")
        ->capture_default_str();
    t->add_flag("--rotate", train.rotate, "random quarter turns (needs --features analytic)");
    t->add_option("--rounds", train.rounds, "label generation rounds per window (count)")->capture_default_str();
    t->add_option("--steps", train.steps, "optimizer steps (count)")->capture_default_str();
    t->add_option("--batch", train.batch, "samples per step (count)")->capture_default_str();
    t->add_option("--lr", train.lr, "Adam learning rate")->capture_default_str();
    t->add_option("--heads", train.heads, "attention heads (count)")->capture_default_str();
    t->add_option("--layers", train.layers, "encoder blocks (count)")->capture_default_str();
    t->add_option("--ffn-multiplier", train.ffnMultiplier, "feed-forward width / model width")->capture_default_str();
    t->add_option("--sigma-perturb", train.cfg.sigmaPerturb, "input coordinate noise (pixels)")->capture_default_str();
    t->add_option("--samples-per-patch", train.cfg.samplesPerPatch, "sources per window N_sample (count)")
        ->capture_default_str();
    t->add_option("--log-every", train.logEvery, "steps between loss reports (count)")->capture_default_str();
    t->add_option("--dump-samples", train.dump, "write the first window's samples to this directory");

    InferArgs inf;
    auto* i = app.add_subcommand("infer", "sliding-window graph inference over a dataset directory");
    addCommon(i, inf.common);
    addExtraction(i, inf.cfg);
    i->add_option("--data", inf.data, "dataset directory (meta.txt, masks/, feats/)")->required();
    i->add_option("--params", inf.params, "topology decoder parameter file")->required();
    i->add_option("--out", inf.out, "output graph (JSON)")->required();
    i->add_option("--fused-mask", inf.fused, "also write the fused mask (RGT1)");

    EvalArgs ev;
    auto* v = app.add_subcommand("eval", "TOPO and APLS of a predicted graph against ground truth");
    addCommon(v, ev.common);
    v->add_option("--gt", ev.gt, "ground-truth graph (JSON)")->required();
    v->add_option("--pred", ev.pred, "predicted graph (JSON)")->required();
    v->add_option("--report", ev.report, "machine-readable report (JSON)");
    v->add_option("--match-radius", ev.topo.matchRadius, "TOPO match radius (pixels)")->capture_default_str();
    v->add_option("--propagation-radius", ev.topo.propagationRadius, "TOPO propagation radius (pixels)")
        ->capture_default_str();
    v->add_option("--sample-interval", ev.topo.sampleInterval, "TOPO marble/hole spacing (pixels)")
        ->capture_default_str();
    v->add_option("--seeds", ev.topo.seedCount, "TOPO seeds per graph (count)")->capture_default_str();
    v->add_option("--snap-radius", ev.aplsParams.snapRadius, "APLS snap radius (pixels)")->capture_default_str();
    v->add_option("--pairs", ev.aplsParams.pairCount, "APLS pairs per direction (count)")->capture_default_str();

    RenderArgs ren;
    auto* n = app.add_subcommand("render", "draw a graph, optionally over a mask, as SVG or PPM");
    addCommon(n, ren.common);
    n->add_option("--graph", ren.graph, "graph (JSON)")->required();
    n->add_option("--out", ren.out, "output image (.svg or .ppm)")->required();
    n->add_option("--mask", ren.mask, "background mask (RGT1)");
    n->add_option("--width", ren.width, "image width (pixels, default from mask or graph)");
    n->add_option("--height", ren.height, "image height (pixels, default from mask or graph)");

    // A repeated single-valued option keeps its last value (config first, flags after).
    for (CLI::App* sub : app.get_subcommands({})) {
        for (CLI::Option* opt : sub->get_options()) {
            if (opt->get_expected_max() <= 1) opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
        }
    }

    std::vector<std::string> args(argv, argv + argc);
    try {
        args = expandConfig(std::move(args), app);
    } catch (const Error& ex) {
        err << "error " << errorCodeName(ex.code()) << ": " << ex.what() << '\n';
        return ex.code() == ErrorCode::Usage ? 2 : 1;
    }
    args.erase(args.begin());
    std::reverse(args.begin(), args.end());

    try {
        app.parse(args);
    } catch (const CLI::CallForHelp& ex) {
        return app.exit(ex, out, err);
    } catch (const CLI::CallForAllHelp& ex) {
        return app.exit(ex, out, err);
    } catch (const CLI::ParseError& ex) {
        std::string msg = ex.what();
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        err << "error " << errorCodeName(ErrorCode::Usage) << ": " << msg << '\n';
        return 2;
    }

    try {
        if (*s) runSynth(synth, out);
        else if (*r) runRasterize(rast, out);
        else if (*e) runExtract(ext, out);
        else if (*t) runTrain(train, out);
        else if (*i) runInfer(inf, out);
        else if (*v) runEval(ev, out);
        else if (*n) runRender(ren, out);
    } catch (const Error& ex) {
        err << "error " << errorCodeName(ex.code()) << ": " << ex.what() << '\n';
        return ex.code() == ErrorCode::Usage ? 2 : 1;
    } catch (const std::exception& ex) {
        err << "error " << errorCodeName(ErrorCode::Io) << ": " << ex.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace roadgraph
