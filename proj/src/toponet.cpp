#include "roadgraph/toponet.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "roadgraph/error.hpp"

namespace roadgraph {

using Eigen::MatrixXd;
using Eigen::RowVectorXd;
using Eigen::VectorXd;

std::size_t TopoSample::validCount() const {
    return static_cast<std::size_t>(std::count(valid.begin(), valid.end(), std::uint8_t{1}));
}

TopoSample buildSample(std::span<const Point> vertices, std::size_t source, std::span<const std::size_t> candidates,
                       const ExtractionConfig& cfg) {
    require(source < vertices.size(), ErrorCode::Contract, "source index out of range");
    const Point s = vertices[source];
    const double r2 = cfg.neighborRadius * cfg.neighborRadius;
    std::vector<std::pair<double, std::size_t>> near;
    for (std::size_t j : candidates) {
        if (j == source) continue;
        const double d2 = distanceSquared(vertices[j], s);
        if (d2 <= r2) near.emplace_back(d2, j);
    }
    std::sort(near.begin(), near.end());
    const std::size_t slots = static_cast<std::size_t>(cfg.maxNeighbors);
    TopoSample sample;
    sample.sourceIndex = source;
    sample.targets.assign(slots, 0);
    sample.valid.assign(slots, 0);
    sample.offsets.assign(slots, Point{});
    for (std::size_t k = 0; k < std::min(slots, near.size()); ++k) {
        const std::size_t j = near[k].second;
        sample.targets[k] = j;
        sample.valid[k] = 1;
        sample.offsets[k] = vertices[j] - s;
    }
    return sample;
}

TopoSample buildSample(std::span<const Point> vertices, std::size_t source, const ExtractionConfig& cfg) {
    std::vector<std::size_t> all(vertices.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    return buildSample(vertices, source, all, cfg);
}

void TopoNetConfig::validate() const {
    require(featureDim > 0 && heads > 0 && layers >= 0 && ffnMultiplier > 0, ErrorCode::Contract,
            "network dimensions must be positive");
    require(featureDim % heads == 0, ErrorCode::Contract, "head count must divide the model width");
    require(offsetScale > 0.0, ErrorCode::Contract, "offset scale must be positive");
}

// ---------------------------------------------------------------------------
// Parameter container

TopoNetParams TopoNetParams::zeros(const TopoNetConfig& config) {
    config.validate();
    const int d = config.modelDim();
    const int f = d * config.ffnMultiplier;
    TopoNetParams p;
    p.config = config;
    p.inputWeight = MatrixXd::Zero(config.inputDim(), d);
    p.inputBias = RowVectorXd::Zero(d);
    p.blocks.resize(config.layers);
    for (auto& b : p.blocks) {
        b.attnNorm = {RowVectorXd::Zero(d), RowVectorXd::Zero(d)};
        b.wq = b.wk = b.wv = b.wo = MatrixXd::Zero(d, d);
        b.bq = b.bk = b.bv = b.bo = RowVectorXd::Zero(d);
        b.ffnNorm = {RowVectorXd::Zero(d), RowVectorXd::Zero(d)};
        b.w1 = MatrixXd::Zero(d, f);
        b.b1 = RowVectorXd::Zero(f);
        b.w2 = MatrixXd::Zero(f, d);
        b.b2 = RowVectorXd::Zero(d);
    }
    p.finalNorm = {RowVectorXd::Zero(d), RowVectorXd::Zero(d)};
    p.headWeight = MatrixXd::Zero(d, 1);
    p.headBias = RowVectorXd::Zero(1);
    return p;
}

TopoNetParams TopoNetParams::initialize(const TopoNetConfig& config, std::uint64_t seed) {
    TopoNetParams p = zeros(config);
    std::mt19937_64 rng(seed);
    auto glorot = [&](MatrixXd& w) {
        const double limit = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
        std::uniform_real_distribution<double> dist(-limit, limit);
        for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = dist(rng);
    };
    glorot(p.inputWeight);
    for (auto& b : p.blocks) {
        b.attnNorm.gamma.setOnes();
        b.ffnNorm.gamma.setOnes();
        glorot(b.wq);
        glorot(b.wk);
        glorot(b.wv);
        glorot(b.wo);
        glorot(b.w1);
        glorot(b.w2);
    }
    p.finalNorm.gamma.setOnes();
    glorot(p.headWeight);
    return p;
}

std::size_t TopoNetParams::parameterCount() const {
    std::size_t n = 0;
    forEachTensor([&](const std::string&, const auto& t) { n += static_cast<std::size_t>(t.size()); });
    return n;
}

void TopoNetParams::setZero() {
    forEachTensor([](const std::string&, auto& t) { t.setZero(); });
}

void TopoNetParams::addScaled(const TopoNetParams& other, double s) {
    std::vector<const double*> src;
    other.forEachTensor([&](const std::string&, const auto& t) { src.push_back(t.data()); });
    std::size_t k = 0;
    forEachTensor([&](const std::string&, auto& t) {
        const double* o = src[k++];
        for (Eigen::Index i = 0; i < t.size(); ++i) t.data()[i] += s * o[i];
    });
}

bool TopoNetParams::allFinite() const {
    bool ok = true;
    forEachTensor([&](const std::string&, const auto& t) { ok = ok && t.allFinite(); });
    return ok;
}

bool TopoNetParams::operator==(const TopoNetParams& other) const {
    if (!(config == other.config) || blocks.size() != other.blocks.size()) return false;
    std::vector<std::pair<const double*, Eigen::Index>> mine;
    forEachTensor([&](const std::string&, const auto& t) { mine.emplace_back(t.data(), t.size()); });
    bool same = true;
    std::size_t k = 0;
    other.forEachTensor([&](const std::string&, const auto& t) {
        if (!same) return;
        if (mine[k].second != t.size() ||
            std::memcmp(mine[k].first, t.data(), sizeof(double) * static_cast<std::size_t>(t.size())) != 0)
            same = false;
        ++k;
    });
    return same;
}

// ---------------------------------------------------------------------------
// Input assembly

TopoInput assembleInput(const TopoNetConfig& config, const FeatureMap& fmap, std::span<const Point> vertices,
                        const TopoSample& sample) {
    require(fmap.channels() == config.featureDim, ErrorCode::Shape,
            "feature map has " + std::to_string(fmap.channels()) + " channels, network expects " +
                std::to_string(config.featureDim));
    require(sample.sourceIndex < vertices.size(), ErrorCode::Contract, "sample source out of range");
    const int d = config.featureDim;
    TopoInput in;
    for (std::size_t k = 0; k < sample.slotCount(); ++k) {
        if (sample.valid[k]) in.slots.push_back(k);
    }
    in.rows.resize(static_cast<Eigen::Index>(in.slots.size()), config.inputDim());
    if (in.slots.empty()) return in;

    std::vector<double> src(d);
    std::vector<double> tgt(d);
    bilinearSample(fmap, vertices[sample.sourceIndex], src);
    for (std::size_t r = 0; r < in.slots.size(); ++r) {
        const std::size_t k = in.slots[r];
        require(sample.targets[k] < vertices.size(), ErrorCode::Contract, "sample target out of range");
        bilinearSample(fmap, vertices[sample.targets[k]], tgt);
        const auto row = static_cast<Eigen::Index>(r);
        for (int c = 0; c < d; ++c) {
            in.rows(row, c) = src[c];
            in.rows(row, d + c) = tgt[c];
        }
        in.rows(row, 2 * d) = sample.offsets[k].x / config.offsetScale;
        in.rows(row, 2 * d + 1) = sample.offsets[k].y / config.offsetScale;
    }
    return in;
}

// ---------------------------------------------------------------------------
// Forward / backward

namespace {

constexpr double kLayerNormEps = 1e-5;

struct LayerNormCache {
    MatrixXd xhat;
    VectorXd rstd;
};

struct BlockCache {
    MatrixXd input;
    LayerNormCache ln1;
    MatrixXd a;
    MatrixXd q, k, v;
    std::vector<MatrixXd> probs;
    MatrixXd attn;
    MatrixXd mid;
    LayerNormCache ln2;
    MatrixXd b;
    MatrixXd hidden;
    MatrixXd act;
};

struct ForwardCache {
    MatrixXd input;
    std::vector<BlockCache> blocks;
    MatrixXd residual;
    LayerNormCache lnf;
    MatrixXd normed;
};

void layerNormForward(const MatrixXd& x, const LayerNormParams& p, MatrixXd& y, LayerNormCache* cache) {
    const Eigen::Index n = x.rows();
    MatrixXd xhat(n, x.cols());
    VectorXd rstd(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double mu = x.row(i).mean();
        const RowVectorXd centered = x.row(i).array() - mu;
        const double var = centered.squaredNorm() / static_cast<double>(x.cols());
        rstd(i) = 1.0 / std::sqrt(var + kLayerNormEps);
        xhat.row(i) = centered * rstd(i);
    }
    y = (xhat.array().rowwise() * p.gamma.array()).rowwise() + p.beta.array();
    if (cache) {
        cache->xhat = std::move(xhat);
        cache->rstd = std::move(rstd);
    }
}

void layerNormBackward(const MatrixXd& dy, const LayerNormParams& p, const LayerNormCache& c, MatrixXd& dx,
                       LayerNormParams& g) {
    g.gamma += (dy.array() * c.xhat.array()).colwise().sum().matrix();
    g.beta += dy.colwise().sum();
    const MatrixXd dxhat = (dy.array().rowwise() * p.gamma.array()).matrix();
    dx.resize(dy.rows(), dy.cols());
    const double inv = 1.0 / static_cast<double>(dy.cols());
    for (Eigen::Index i = 0; i < dy.rows(); ++i) {
        const double m1 = dxhat.row(i).sum() * inv;
        const double m2 = dxhat.row(i).dot(c.xhat.row(i)) * inv;
        dx.row(i) = c.rstd(i) * (dxhat.row(i).array() - m1 - c.xhat.row(i).array() * m2).matrix();
    }
}

MatrixXd affine(const MatrixXd& x, const MatrixXd& w, const RowVectorXd& b) {
    MatrixXd y = x * w;
    y.rowwise() += b;
    return y;
}

void softmaxRows(MatrixXd& s) {
    for (Eigen::Index i = 0; i < s.rows(); ++i) {
        const double m = s.row(i).maxCoeff();
        s.row(i) = (s.row(i).array() - m).exp();
        s.row(i) /= s.row(i).sum();
    }
}

MatrixXd blockForward(const EncoderBlockParams& p, const TopoNetConfig& cfg, const MatrixXd& x, BlockCache* c,
                      std::vector<std::uint8_t>* pattern) {
    const int heads = cfg.heads;
    const int dh = cfg.modelDim() / heads;
    const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

    MatrixXd a;
    layerNormForward(x, p.attnNorm, a, c ? &c->ln1 : nullptr);
    MatrixXd q = affine(a, p.wq, p.bq);
    MatrixXd k = affine(a, p.wk, p.bk);
    MatrixXd v = affine(a, p.wv, p.bv);
    MatrixXd attn(x.rows(), x.cols());
    if (c) c->probs.resize(heads);
    for (int h = 0; h < heads; ++h) {
        MatrixXd s = q.middleCols(h * dh, dh) * k.middleCols(h * dh, dh).transpose() * scale;
        softmaxRows(s);
        attn.middleCols(h * dh, dh) = s * v.middleCols(h * dh, dh);
        if (c) c->probs[h] = std::move(s);
    }
    MatrixXd mid = x + affine(attn, p.wo, p.bo);

    MatrixXd b;
    layerNormForward(mid, p.ffnNorm, b, c ? &c->ln2 : nullptr);
    MatrixXd hidden = affine(b, p.w1, p.b1);
    MatrixXd act = hidden.cwiseMax(0.0);
    if (pattern) {
        for (Eigen::Index i = 0; i < hidden.size(); ++i) pattern->push_back(hidden.data()[i] > 0.0);
    }
    MatrixXd out = mid + affine(act, p.w2, p.b2);

    if (c) {
        c->input = x;
        c->a = std::move(a);
        c->q = std::move(q);
        c->k = std::move(k);
        c->v = std::move(v);
        c->attn = std::move(attn);
        c->mid = std::move(mid);
        c->b = std::move(b);
        c->hidden = std::move(hidden);
        c->act = std::move(act);
    }
    return out;
}

MatrixXd blockBackward(const EncoderBlockParams& p, const TopoNetConfig& cfg, const BlockCache& c,
                       const MatrixXd& dout, EncoderBlockParams& g) {
    const int heads = cfg.heads;
    const int dh = cfg.modelDim() / heads;
    const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

    // Feed-forward sublayer.
    g.w2.noalias() += c.act.transpose() * dout;
    g.b2 += dout.colwise().sum();
    MatrixXd dhidden = (dout * p.w2.transpose()).cwiseProduct((c.hidden.array() > 0.0).cast<double>().matrix());
    g.w1.noalias() += c.b.transpose() * dhidden;
    g.b1 += dhidden.colwise().sum();
    const MatrixXd db = dhidden * p.w1.transpose();
    MatrixXd dmidNorm;
    layerNormBackward(db, p.ffnNorm, c.ln2, dmidNorm, g.ffnNorm);
    const MatrixXd dmid = dout + dmidNorm;

    // Attention sublayer.
    g.wo.noalias() += c.attn.transpose() * dmid;
    g.bo += dmid.colwise().sum();
    const MatrixXd dattn = dmid * p.wo.transpose();
    MatrixXd dq(c.q.rows(), c.q.cols());
    MatrixXd dk(c.k.rows(), c.k.cols());
    MatrixXd dv(c.v.rows(), c.v.cols());
    for (int h = 0; h < heads; ++h) {
        const MatrixXd& prob = c.probs[h];
        const auto dO = dattn.middleCols(h * dh, dh);
        const MatrixXd dP = dO * c.v.middleCols(h * dh, dh).transpose();
        dv.middleCols(h * dh, dh) = prob.transpose() * dO;
        const VectorXd rowDot = (dP.array() * prob.array()).rowwise().sum();
        const MatrixXd dS = (prob.array() * (dP.colwise() - rowDot).array()).matrix() * scale;
        dq.middleCols(h * dh, dh) = dS * c.k.middleCols(h * dh, dh);
        dk.middleCols(h * dh, dh) = dS.transpose() * c.q.middleCols(h * dh, dh);
    }
    g.wq.noalias() += c.a.transpose() * dq;
    g.wk.noalias() += c.a.transpose() * dk;
    g.wv.noalias() += c.a.transpose() * dv;
    g.bq += dq.colwise().sum();
    g.bk += dk.colwise().sum();
    g.bv += dv.colwise().sum();
    const MatrixXd da = dq * p.wq.transpose() + dk * p.wk.transpose() + dv * p.wv.transpose();
    MatrixXd dxNorm;
    layerNormBackward(da, p.attnNorm, c.ln1, dxNorm, g.attnNorm);
    return dmid + dxNorm;
}

VectorXd forwardImpl(const TopoNetParams& params, const MatrixXd& rows, ForwardCache* cache,
                     std::vector<std::uint8_t>* pattern = nullptr) {
    require(rows.cols() == params.config.inputDim(), ErrorCode::Shape,
            "input rows have " + std::to_string(rows.cols()) + " columns, network expects " +
                std::to_string(params.config.inputDim()));
    MatrixXd x = affine(rows, params.inputWeight, params.inputBias);
    if (cache) {
        cache->input = rows;
        cache->blocks.resize(params.blocks.size());
    }
    for (std::size_t l = 0; l < params.blocks.size(); ++l) {
        x = blockForward(params.blocks[l], params.config, x, cache ? &cache->blocks[l] : nullptr, pattern);
    }
    MatrixXd normed;
    layerNormForward(x, params.finalNorm, normed, cache ? &cache->lnf : nullptr);
    VectorXd logits = (normed * params.headWeight).col(0).array() + params.headBias(0);
    if (cache) {
        cache->residual = std::move(x);
        cache->normed = std::move(normed);
    }
    return logits;
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double clampedBce(double p, double y, bool* clamped) {
    const double pc = std::clamp(p, kProbabilityClamp, 1.0 - kProbabilityClamp);
    if (clamped) *clamped = pc != p;
    return -(y * std::log(pc) + (1.0 - y) * std::log(1.0 - pc));
}

}  // namespace

VectorXd forwardLogits(const TopoNetParams& params, const MatrixXd& rows) {
    if (rows.rows() == 0) return VectorXd(0);
    return forwardImpl(params, rows, nullptr);
}

std::vector<double> forward(const TopoNetParams& params, const FeatureMap& fmap, std::span<const Point> vertices,
                            const TopoSample& sample) {
    const TopoInput in = assembleInput(params.config, fmap, vertices, sample);
    std::vector<double> probs(sample.slotCount(), sigmoid(params.headBias(0)));
    if (in.slots.empty()) return probs;
    const VectorXd logits = forwardImpl(params, in.rows, nullptr);
    for (std::size_t r = 0; r < in.slots.size(); ++r) probs[in.slots[r]] = sigmoid(logits(static_cast<Eigen::Index>(r)));
    return probs;
}

double bceLoss(std::span<const double> probabilities, std::span<const std::uint8_t> labels,
               std::span<const std::uint8_t> valid) {
    require(probabilities.size() == labels.size() && labels.size() == valid.size(), ErrorCode::Shape,
            "probabilities, labels and validity must have equal length");
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t k = 0; k < probabilities.size(); ++k) {
        if (!valid[k]) continue;
        sum += clampedBce(probabilities[k], labels[k] ? 1.0 : 0.0, nullptr);
        ++n;
    }
    return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

double accumulateGradient(const TopoNetParams& params, const MatrixXd& rows, std::span<const double> labels,
                          double scale, TopoNetParams& grad) {
    require(static_cast<Eigen::Index>(labels.size()) == rows.rows(), ErrorCode::Shape,
            "one label per input row is required");
    if (rows.rows() == 0) return 0.0;
    ForwardCache cache;
    const VectorXd logits = forwardImpl(params, rows, &cache);

    const Eigen::Index n = rows.rows();
    double lossSum = 0.0;
    MatrixXd dlogit(n, 1);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double p = sigmoid(logits(i));
        bool clamped = false;
        lossSum += clampedBce(p, labels[i], &clamped);
        dlogit(i, 0) = clamped ? 0.0 : scale * (p - labels[i]);
    }

    grad.headWeight.noalias() += cache.normed.transpose() * dlogit;
    grad.headBias(0) += dlogit.sum();
    const MatrixXd dnormed = dlogit * params.headWeight.transpose();
    MatrixXd dx;
    layerNormBackward(dnormed, params.finalNorm, cache.lnf, dx, grad.finalNorm);
    for (std::size_t l = params.blocks.size(); l-- > 0;) {
        dx = blockBackward(params.blocks[l], params.config, cache.blocks[l], dx, grad.blocks[l]);
    }
    grad.inputWeight.noalias() += rows.transpose() * dx;
    grad.inputBias += dx.colwise().sum();
    return lossSum;
}

TopoNetParams backward(const TopoNetParams& params, const MatrixXd& rows, std::span<const double> labels,
                       double* loss) {
    TopoNetParams grad = TopoNetParams::zeros(params.config);
    const double n = static_cast<double>(rows.rows());
    const double sum = n > 0 ? accumulateGradient(params, rows, labels, 1.0 / n, grad) : 0.0;
    if (loss) *loss = n > 0 ? sum / n : 0.0;
    return grad;
}

double rowsLoss(const TopoNetParams& params, const MatrixXd& rows, std::span<const double> labels,
                std::vector<std::uint8_t>* reluPattern) {
    if (reluPattern) reluPattern->clear();
    if (rows.rows() == 0) return 0.0;
    const VectorXd logits = forwardImpl(params, rows, nullptr, reluPattern);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < logits.size(); ++i) sum += clampedBce(sigmoid(logits(i)), labels[i], nullptr);
    return sum / static_cast<double>(logits.size());
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

constexpr char kParamsMagic[4] = {'R', 'G', 'T', 'C'};

std::string dimsText(Eigen::Index rows, Eigen::Index cols) {
    return std::to_string(rows) + "x" + std::to_string(cols);
}

}  // namespace

void saveParams(const std::filesystem::path& path, const TopoNetParams& params) {
    std::ostringstream manifest;
    const auto& c = params.config;
    manifest << "roadgraph-topo-params 1\n";
    manifest << "config feature_dim=" << c.featureDim << " heads=" << c.heads << " layers=" << c.layers
             << " ffn_multiplier=" << c.ffnMultiplier << " offset_scale=" << c.offsetScale << "\n";
    params.forEachTensor([&](const std::string& name, const auto& t) {
        manifest << "tensor " << name << " f64 " << dimsText(t.rows(), t.cols()) << "\n";
    });
    const std::string text = manifest.str();

    std::ofstream out(path, std::ios::binary);
    require(static_cast<bool>(out), ErrorCode::Io, "cannot open " + path.string() + " for writing");
    out.write(kParamsMagic, 4);
    const std::uint64_t size = text.size();
    out.write(reinterpret_cast<const char*>(&size), sizeof(size));
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    params.forEachTensor([&](const std::string&, const auto& t) {
        Tensor tensor;
        tensor.dtype = DType::Float64;
        tensor.dims = {static_cast<std::uint64_t>(t.rows()), static_cast<std::uint64_t>(t.cols())};
        tensor.values.resize(static_cast<std::size_t>(t.size()));
        // Eigen storage is column-major; the file is row-major.
        for (Eigen::Index i = 0; i < t.rows(); ++i)
            for (Eigen::Index j = 0; j < t.cols(); ++j)
                tensor.values[static_cast<std::size_t>(i * t.cols() + j)] = t(i, j);
        writeTensor(out, tensor);
    });
    require(static_cast<bool>(out), ErrorCode::Io, "failed writing " + path.string());
}

TopoNetParams loadParams(const std::filesystem::path& path, const TopoNetConfig* expected) {
    std::ifstream in(path, std::ios::binary);
    require(static_cast<bool>(in), ErrorCode::Io, "cannot open " + path.string());
    char magic[4] = {};
    in.read(magic, 4);
    require(in.gcount() == 4 && std::memcmp(magic, kParamsMagic, 4) == 0, ErrorCode::Format,
            path.string() + ": not a parameter file");
    std::uint64_t size = 0;
    in.read(reinterpret_cast<char*>(&size), sizeof(size));
    require(in.gcount() == sizeof(size) && size < (1u << 24), ErrorCode::Format, path.string() + ": bad manifest size");
    std::string text(size, '\0');
    in.read(text.data(), static_cast<std::streamsize>(size));
    require(in.gcount() == static_cast<std::streamsize>(size), ErrorCode::Format, path.string() + ": truncated manifest");

    std::istringstream lines(text);
    std::string line;
    std::getline(lines, line);
    require(line == "roadgraph-topo-params 1", ErrorCode::Format, path.string() + ": unknown manifest header");
    TopoNetConfig config;
    std::vector<std::pair<std::string, std::string>> entries;  // name, dims
    while (std::getline(lines, line)) {
        std::istringstream ls(line);
        std::string kind;
        ls >> kind;
        if (kind == "config") {
            std::string kv;
            while (ls >> kv) {
                const auto eq = kv.find('=');
                require(eq != std::string::npos, ErrorCode::Format, "bad config entry " + kv);
                const std::string key = kv.substr(0, eq);
                const std::string value = kv.substr(eq + 1);
                if (key == "feature_dim") config.featureDim = std::stoi(value);
                else if (key == "heads") config.heads = std::stoi(value);
                else if (key == "layers") config.layers = std::stoi(value);
                else if (key == "ffn_multiplier") config.ffnMultiplier = std::stoi(value);
                else if (key == "offset_scale") config.offsetScale = std::stod(value);
            }
        } else if (kind == "tensor") {
            std::string name, dtype, dims;
            ls >> name >> dtype >> dims;
            require(dtype == "f64", ErrorCode::Format, "tensor " + name + ": unsupported dtype " + dtype);
            entries.emplace_back(name, dims);
        }
    }

    const TopoNetConfig& shapeConfig = expected ? *expected : config;
    TopoNetParams params = TopoNetParams::zeros(shapeConfig);
    params.config = config;
    std::map<std::string, std::size_t> position;
    for (std::size_t i = 0; i < entries.size(); ++i) position[entries[i].first] = i;

    // Check presence and shape of every expected tensor before reading payloads.
    params.forEachTensor([&](const std::string& name, const auto& t) {
        auto it = position.find(name);
        require(it != position.end(), ErrorCode::Format, "tensor " + name + " missing from " + path.string());
        const std::string want = dimsText(t.rows(), t.cols());
        require(entries[it->second].second == want, ErrorCode::Shape,
                "tensor " + name + ": expected " + want + ", file has " + entries[it->second].second);
    });
    std::size_t expectedCount = 0;
    params.forEachTensor([&](const std::string&, const auto&) { ++expectedCount; });
    require(entries.size() == expectedCount, ErrorCode::Format,
            path.string() + ": manifest lists " + std::to_string(entries.size()) + " tensors, expected " +
                std::to_string(expectedCount));

    std::vector<Tensor> blobs;
    blobs.reserve(entries.size());
    for (const auto& entry : entries) blobs.push_back(readTensor(in, "tensor " + entry.first));
    params.forEachTensor([&](const std::string& name, auto& t) {
        const Tensor& blob = blobs[position.at(name)];
        require(blob.dims.size() == 2 && blob.dims[0] == static_cast<std::uint64_t>(t.rows()) &&
                    blob.dims[1] == static_cast<std::uint64_t>(t.cols()),
                ErrorCode::Shape, "tensor " + name + ": payload shape disagrees with the manifest");
        for (Eigen::Index i = 0; i < t.rows(); ++i)
            for (Eigen::Index j = 0; j < t.cols(); ++j)
                t(i, j) = blob.values[static_cast<std::size_t>(i * t.cols() + j)];
    });
    require(params.allFinite(), ErrorCode::Format, path.string() + ": parameters contain non-finite values");
    return params;
}

}  // namespace roadgraph
