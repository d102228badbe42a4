#include <cmath>
#include <random>
#include <vector>

#include "roadgraph/error.hpp"
#include "roadgraph/parallel.hpp"
#include "roadgraph/toponet.hpp"

namespace roadgraph {

namespace {

struct SampleRef {
    std::size_t patch;
    std::size_t sample;
};

constexpr std::size_t kChunk = 4;  // batch items per gradient partial

void adamStep(TopoNetParams& params, TopoNetParams& m, TopoNetParams& v, const TopoNetParams& grad,
              const TrainOptions& o, int t) {
    const double c1 = 1.0 - std::pow(o.beta1, t);
    const double c2 = 1.0 - std::pow(o.beta2, t);
    std::vector<double*> mp, vp;
    std::vector<const double*> gp;
    m.forEachTensor([&](const std::string&, auto& x) { mp.push_back(x.data()); });
    v.forEachTensor([&](const std::string&, auto& x) { vp.push_back(x.data()); });
    grad.forEachTensor([&](const std::string&, const auto& x) { gp.push_back(x.data()); });
    std::size_t k = 0;
    params.forEachTensor([&](const std::string&, auto& x) {
        double* mk = mp[k];
        double* vk = vp[k];
        const double* gk = gp[k];
        double* w = x.data();
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            mk[i] = o.beta1 * mk[i] + (1.0 - o.beta1) * gk[i];
            vk[i] = o.beta2 * vk[i] + (1.0 - o.beta2) * gk[i] * gk[i];
            const double mhat = mk[i] / c1;
            const double vhat = vk[i] / c2;
            w[i] -= o.learningRate * mhat / (std::sqrt(vhat) + o.epsilon);
        }
        ++k;
    });
}

}  // namespace

TrainResult trainTopoNet(std::span<const TrainingPatch> patches, const TrainOptions& options,
                         const TopoNetParams* init) {
    require(options.batchSize >= 1 && options.steps >= 0, ErrorCode::Contract, "batch size and steps must be positive");
    std::vector<SampleRef> refs;
    for (std::size_t p = 0; p < patches.size(); ++p) {
        for (std::size_t s = 0; s < patches[p].samples.size(); ++s) {
            const TopoSample& sample = patches[p].samples[s];
            require(sample.labels.size() == sample.slotCount(), ErrorCode::Contract,
                    "training samples must carry one label per slot");
            if (sample.validCount() > 0) refs.push_back({p, s});
        }
    }
    require(!refs.empty(), ErrorCode::Contract, "training stream holds no sample with a valid slot");

    TrainResult result;
    result.params = init ? *init : TopoNetParams::initialize(options.net, options.seed);
    const TopoNetConfig& net = result.params.config;
    TopoNetParams m = TopoNetParams::zeros(net);
    TopoNetParams v = TopoNetParams::zeros(net);
    TopoNetParams grad = TopoNetParams::zeros(net);

    std::mt19937_64 rng(options.seed ^ 0x9e3779b97f4a7c15ULL);
    std::uniform_int_distribution<std::size_t> pick(0, refs.size() - 1);
    const std::size_t batch = static_cast<std::size_t>(options.batchSize);
    const std::size_t chunks = (batch + kChunk - 1) / kChunk;
    std::vector<TopoNetParams> partial(chunks, TopoNetParams::zeros(net));
    std::vector<double> partialLoss(chunks);
    std::vector<TopoInput> inputs(batch);
    std::vector<std::vector<double>> labels(batch);

    result.lossHistory.reserve(static_cast<std::size_t>(options.steps));
    for (int step = 1; step <= options.steps; ++step) {
        std::size_t validTotal = 0;
        for (std::size_t b = 0; b < batch; ++b) {
            const SampleRef ref = refs[pick(rng)];
            const TrainingPatch& patch = patches[ref.patch];
            const TopoSample& sample = patch.samples[ref.sample];
            inputs[b] = assembleInput(net, patch.features, patch.vertices, sample);
            labels[b].clear();
            for (std::size_t slot : inputs[b].slots) labels[b].push_back(sample.labels[slot] ? 1.0 : 0.0);
            validTotal += inputs[b].slots.size();
        }
        const double scale = 1.0 / static_cast<double>(validTotal);

        parallelFor(chunks, options.threads, [&](std::size_t c) {
            partial[c].setZero();
            double sum = 0.0;
            for (std::size_t b = c * kChunk; b < std::min(batch, (c + 1) * kChunk); ++b) {
                sum += accumulateGradient(result.params, inputs[b].rows, labels[b], scale, partial[c]);
            }
            partialLoss[c] = sum;
        });

        grad.setZero();
        double lossSum = 0.0;
        for (std::size_t c = 0; c < chunks; ++c) {
            grad.addScaled(partial[c], 1.0);
            lossSum += partialLoss[c];
        }
        const double loss = lossSum * scale;
        if (!std::isfinite(loss) || !grad.allFinite()) {
            fail(ErrorCode::Numeric, "non-finite loss or gradient at training step " + std::to_string(step));
        }
        result.lossHistory.push_back(loss);
        adamStep(result.params, m, v, grad, options, step);
        if (options.progress && options.logEvery > 0 && step % options.logEvery == 0) options.progress(step, loss);
    }
    return result;
}

}  // namespace roadgraph
