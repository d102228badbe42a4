#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "roadgraph/config.hpp"
#include "roadgraph/geometry.hpp"
#include "roadgraph/tensor.hpp"

namespace roadgraph {

/// One topology query: a source vertex and up to N_nbr nearby targets.
/// Slots past the valid ones are zero-filled.
struct TopoSample {
    std::size_t sourceIndex{0};
    std::vector<std::size_t> targets;   // N_nbr slots
    std::vector<std::uint8_t> valid;    // per slot
    std::vector<Point> offsets;         // target - source, pixels
    std::vector<std::uint8_t> labels;   // per slot; empty when unlabeled

    std::size_t slotCount() const { return targets.size(); }
    std::size_t validCount() const;
};

/// The ≤ N_nbr nearest other vertices within R_nbr of `source`, ascending by
/// distance (ties by index).
TopoSample buildSample(std::span<const Point> vertices, std::size_t source, const ExtractionConfig& cfg);

/// Same, but only `candidates` (indices into `vertices`) may become targets.
TopoSample buildSample(std::span<const Point> vertices, std::size_t source, std::span<const std::size_t> candidates,
                       const ExtractionConfig& cfg);

struct TopoNetConfig {
    int featureDim{32};       // D_feat; the model width follows it
    int heads{4};
    int layers{3};
    int ffnMultiplier{4};
    double offsetScale{64.0}; // offsets enter the network divided by this

    int modelDim() const { return featureDim; }
    int inputDim() const { return 2 * featureDim + 2; }
    void validate() const;

    friend bool operator==(const TopoNetConfig&, const TopoNetConfig&) = default;
};

struct LayerNormParams {
    Eigen::RowVectorXd gamma;
    Eigen::RowVectorXd beta;
};

struct EncoderBlockParams {
    LayerNormParams attnNorm;
    Eigen::MatrixXd wq, wk, wv, wo;
    Eigen::RowVectorXd bq, bk, bv, bo;
    LayerNormParams ffnNorm;
    Eigen::MatrixXd w1, w2;
    Eigen::RowVectorXd b1, b2;
};

/// Weights of the edge classifier: input projection, pre-norm encoder blocks
/// (multi-head self-attention + ReLU feed-forward, both residual), a final
/// layer norm and a linear head. Weight matrices are (in x out).
struct TopoNetParams {
    TopoNetConfig config;
    Eigen::MatrixXd inputWeight;
    Eigen::RowVectorXd inputBias;
    std::vector<EncoderBlockParams> blocks;
    LayerNormParams finalNorm;
    Eigen::MatrixXd headWeight;   // D x 1
    Eigen::RowVectorXd headBias;  // 1

    /// All tensors zero (layer-norm gains included).
    static TopoNetParams zeros(const TopoNetConfig& config);

    /// Glorot-uniform weights, zero biases, unit layer-norm gains.
    static TopoNetParams initialize(const TopoNetConfig& config, std::uint64_t seed);

    /// Calls f(name, tensor) for every tensor in a fixed order; tensor is an
    /// Eigen::MatrixXd or Eigen::RowVectorXd.
    template <typename F>
    void forEachTensor(F&& f);
    template <typename F>
    void forEachTensor(F&& f) const;

    std::size_t parameterCount() const;
    void setZero();
    /// this += s * other
    void addScaled(const TopoNetParams& other, double s);
    bool allFinite() const;

    bool operator==(const TopoNetParams& other) const;
};

/// Network input for the valid slots of one sample: one row per valid slot,
/// [f_src, f_tgt, dx / offsetScale, dy / offsetScale].
struct TopoInput {
    Eigen::MatrixXd rows;
    std::vector<std::size_t> slots;  // slot index of each row
};

TopoInput assembleInput(const TopoNetConfig& config, const FeatureMap& fmap, std::span<const Point> vertices,
                        const TopoSample& sample);

/// Edge logits for the given token rows; tokens attend only to each other,
/// which is the masked attention over valid slots.
Eigen::VectorXd forwardLogits(const TopoNetParams& params, const Eigen::MatrixXd& rows);

/// Per-slot edge probabilities. Invalid slots report sigmoid(head bias) and
/// must be ignored by callers.
std::vector<double> forward(const TopoNetParams& params, const FeatureMap& fmap, std::span<const Point> vertices,
                            const TopoSample& sample);

inline constexpr double kProbabilityClamp = 1e-7;

/// Mean binary cross entropy over valid slots (0 when none are valid).
double bceLoss(std::span<const double> probabilities, std::span<const std::uint8_t> labels,
               std::span<const std::uint8_t> valid);

/// Adds scale * d(sum of per-row BCE)/d(params) into `grad` and returns the
/// unscaled sum of per-row losses. `labels` has one entry per row.
double accumulateGradient(const TopoNetParams& params, const Eigen::MatrixXd& rows,
                          std::span<const double> labels, double scale, TopoNetParams& grad);

/// Gradient of the mean loss over the rows.
TopoNetParams backward(const TopoNetParams& params, const Eigen::MatrixXd& rows, std::span<const double> labels,
                       double* loss = nullptr);

/// Mean BCE over rows, forward only. `reluPattern`, when given, receives the
/// on/off state of every feed-forward ReLU unit (finite-difference checks use
/// it to spot perturbations that cross a kink).
double rowsLoss(const TopoNetParams& params, const Eigen::MatrixXd& rows, std::span<const double> labels,
                std::vector<std::uint8_t>* reluPattern = nullptr);

/// Binary container: "RGTC", u64 manifest size, a text manifest naming each
/// tensor (name, dtype, dims) and the model config, then one RGT1 blob per
/// tensor in manifest order.
void saveParams(const std::filesystem::path& path, const TopoNetParams& params);

/// When `expected` is given, every tensor must match its shape.
TopoNetParams loadParams(const std::filesystem::path& path, const TopoNetConfig* expected = nullptr);

// ---------------------------------------------------------------------------
// Training

struct TrainingPatch {
    FeatureMap features;
    std::vector<Point> vertices;  // network-input coordinates
    std::vector<TopoSample> samples;
};

struct TrainOptions {
    TopoNetConfig net;
    double learningRate{1e-3};
    double beta1{0.9};
    double beta2{0.999};
    double epsilon{1e-8};
    int steps{1000};
    int batchSize{32};
    std::uint64_t seed{0};
    int threads{1};
    /// Called every `logEvery` steps with (step, mean batch loss).
    std::function<void(int, double)> progress;
    int logEvery{100};
};

struct TrainResult {
    TopoNetParams params;
    std::vector<double> lossHistory;  // one mean batch loss per step
};

/// Adam on the mean BCE of all valid entries of each random batch.
/// Deterministic for a given seed regardless of thread count.
TrainResult trainTopoNet(std::span<const TrainingPatch> patches, const TrainOptions& options,
                         const TopoNetParams* init = nullptr);

// ---------------------------------------------------------------------------

template <typename F>
void TopoNetParams::forEachTensor(F&& f) {
    f(std::string("input.weight"), inputWeight);
    f(std::string("input.bias"), inputBias);
    for (std::size_t l = 0; l < blocks.size(); ++l) {
        auto& b = blocks[l];
        const std::string p = "blocks." + std::to_string(l) + ".";
        f(p + "attn_norm.gamma", b.attnNorm.gamma);
        f(p + "attn_norm.beta", b.attnNorm.beta);
        f(p + "attn.wq", b.wq);
        f(p + "attn.bq", b.bq);
        f(p + "attn.wk", b.wk);
        f(p + "attn.bk", b.bk);
        f(p + "attn.wv", b.wv);
        f(p + "attn.bv", b.bv);
        f(p + "attn.wo", b.wo);
        f(p + "attn.bo", b.bo);
        f(p + "ffn_norm.gamma", b.ffnNorm.gamma);
        f(p + "ffn_norm.beta", b.ffnNorm.beta);
        f(p + "ffn.w1", b.w1);
        f(p + "ffn.b1", b.b1);
        f(p + "ffn.w2", b.w2);
        f(p + "ffn.b2", b.b2);
    }
    f(std::string("final_norm.gamma"), finalNorm.gamma);
    f(std::string("final_norm.beta"), finalNorm.beta);
    f(std::string("head.weight"), headWeight);
    f(std::string("head.bias"), headBias);
}

template <typename F>
void TopoNetParams::forEachTensor(F&& f) const {
    const_cast<TopoNetParams*>(this)->forEachTensor(
        [&](const std::string& name, const auto& tensor) { f(name, tensor); });
}

}  // namespace roadgraph
