#include "roadgraph/tensor.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "roadgraph/error.hpp"

namespace roadgraph {

static_assert(std::endian::native == std::endian::little, "RGT1 I/O assumes a little-endian host");

namespace {

constexpr char kMagic[4] = {'R', 'G', 'T', '1'};
constexpr std::uint32_t kMaxDims = 8;

template <typename T>
void put(std::ostream& out, T value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::istream& in, const std::string& what) {
    T value{};
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    require(in.gcount() == static_cast<std::streamsize>(sizeof(T)), ErrorCode::Format,
            what + ": truncated header");
    return value;
}

}  // namespace

std::uint64_t Tensor::elementCount() const {
    std::uint64_t n = 1;
    for (auto d : dims) n *= d;
    return n;
}

void writeTensor(std::ostream& out, const Tensor& t) {
    require(t.values.size() == t.elementCount(), ErrorCode::Shape, "tensor payload does not match its dims");
    out.write(kMagic, 4);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(t.dtype));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(t.dims.size()));
    for (auto d : t.dims) put<std::uint64_t>(out, d);
    if (t.dtype == DType::Float32) {
        std::vector<float> buf(t.values.begin(), t.values.end());
        out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size() * sizeof(float)));
    } else {
        out.write(reinterpret_cast<const char*>(t.values.data()),
                  static_cast<std::streamsize>(t.values.size() * sizeof(double)));
    }
}

Tensor readTensor(std::istream& in, const std::string& what) {
    char magic[4] = {};
    in.read(magic, 4);
    require(in.gcount() == 4 && std::memcmp(magic, kMagic, 4) == 0, ErrorCode::Format, what + ": bad magic");
    Tensor t;
    const auto code = get<std::uint32_t>(in, what);
    require(code == 0 || code == 1, ErrorCode::Format, what + ": unknown dtype code " + std::to_string(code));
    t.dtype = static_cast<DType>(code);
    const auto ndim = get<std::uint32_t>(in, what);
    require(ndim <= kMaxDims, ErrorCode::Format, what + ": too many dimensions");
    for (std::uint32_t i = 0; i < ndim; ++i) t.dims.push_back(get<std::uint64_t>(in, what));
    const std::uint64_t n = t.elementCount();
    require(n < (std::uint64_t{1} << 34), ErrorCode::Format, what + ": implausible element count");
    t.values.resize(n);
    if (t.dtype == DType::Float32) {
        std::vector<float> buf(n);
        in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(n * sizeof(float)));
        require(in.gcount() == static_cast<std::streamsize>(n * sizeof(float)), ErrorCode::Format,
                what + ": truncated payload");
        std::copy(buf.begin(), buf.end(), t.values.begin());
    } else {
        in.read(reinterpret_cast<char*>(t.values.data()), static_cast<std::streamsize>(n * sizeof(double)));
        require(in.gcount() == static_cast<std::streamsize>(n * sizeof(double)), ErrorCode::Format,
                what + ": truncated payload");
    }
    return t;
}

void saveTensor(const std::filesystem::path& path, const Tensor& t) {
    std::ofstream out(path, std::ios::binary);
    require(static_cast<bool>(out), ErrorCode::Io, "cannot open " + path.string() + " for writing");
    writeTensor(out, t);
    require(static_cast<bool>(out), ErrorCode::Io, "failed writing " + path.string());
}

Tensor loadTensor(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    require(static_cast<bool>(in), ErrorCode::Io, "cannot open " + path.string());
    return readTensor(in, path.string());
}

// ---------------------------------------------------------------------------

ProbMask::ProbMask(int width, int height) : width_(width), height_(height) {
    require(width > 0 && height > 0, ErrorCode::Shape, "mask extent must be positive");
    data_.assign(static_cast<std::size_t>(width) * height * 2, 0.0f);
}

void ProbMask::validate() const {
    for (std::size_t i = 0; i < data_.size(); ++i) {
        const float v = data_[i];
        require(v >= 0.0f && v <= 1.0f, ErrorCode::Contract,
                "mask value out of [0,1] at element " + std::to_string(i));
    }
}

Tensor ProbMask::toTensor() const {
    Tensor t;
    t.dims = {static_cast<std::uint64_t>(height_), static_cast<std::uint64_t>(width_), 2};
    t.values.assign(data_.begin(), data_.end());
    return t;
}

ProbMask ProbMask::fromTensor(const Tensor& t) {
    require(t.dims.size() == 3 && t.dims[2] == 2, ErrorCode::Shape, "mask tensor must have dims (H, W, 2)");
    ProbMask m(static_cast<int>(t.dims[1]), static_cast<int>(t.dims[0]));
    std::transform(t.values.begin(), t.values.end(), m.data_.begin(),
                   [](double v) { return static_cast<float>(v); });
    m.validate();
    return m;
}

ProbMask ProbMask::crop(int x, int y, int w, int h) const {
    require(x >= 0 && y >= 0 && w > 0 && h > 0 && x + w <= width_ && y + h <= height_, ErrorCode::Contract,
            "crop rectangle outside the mask");
    ProbMask out(w, h);
    for (int row = 0; row < h; ++row) {
        const float* src = &data_[index(x, y + row, 0)];
        std::copy(src, src + static_cast<std::size_t>(w) * 2, &out.data_[out.index(0, row, 0)]);
    }
    return out;
}

FeatureMap::FeatureMap(int widthCells, int heightCells, int channels, int scale)
    : widthF_(widthCells), heightF_(heightCells), channels_(channels), scale_(scale) {
    require(widthCells > 0 && heightCells > 0 && channels > 0 && scale > 0, ErrorCode::Shape,
            "feature map dimensions must be positive");
    data_.assign(static_cast<std::size_t>(widthCells) * heightCells * channels, 0.0f);
}

Rect FeatureMap::windowExtent() const {
    return {-0.5, -0.5, widthF_ * static_cast<double>(scale_) - 0.5, heightF_ * static_cast<double>(scale_) - 0.5};
}

Tensor FeatureMap::toTensor() const {
    Tensor t;
    t.dims = {static_cast<std::uint64_t>(heightF_), static_cast<std::uint64_t>(widthF_),
              static_cast<std::uint64_t>(channels_)};
    t.values.assign(data_.begin(), data_.end());
    return t;
}

FeatureMap FeatureMap::fromTensor(const Tensor& t, int scale) {
    require(t.dims.size() == 3, ErrorCode::Shape, "feature tensor must have dims (Hf, Wf, D)");
    FeatureMap f(static_cast<int>(t.dims[1]), static_cast<int>(t.dims[0]), static_cast<int>(t.dims[2]), scale);
    for (std::size_t i = 0; i < t.values.size(); ++i) {
        require(std::isfinite(t.values[i]), ErrorCode::Contract, "feature map holds a non-finite value");
        f.data_[i] = static_cast<float>(t.values[i]);
    }
    return f;
}

void bilinearSample(const FeatureMap& fmap, Point p, std::span<double> out) {
    require(out.size() == static_cast<std::size_t>(fmap.channels()), ErrorCode::Shape,
            "bilinear output span does not match the channel count");
    require(std::isfinite(p.x) && std::isfinite(p.y) && fmap.windowExtent().contains(p), ErrorCode::Contract,
            "sample point (" + std::to_string(p.x) + ", " + std::to_string(p.y) + ") outside the window");
    const double scale = fmap.scale();
    const double maxX = fmap.widthCells() - 1;
    const double maxY = fmap.heightCells() - 1;
    const double cx = std::clamp(p.x / scale - 0.5, 0.0, maxX);
    const double cy = std::clamp(p.y / scale - 0.5, 0.0, maxY);
    const int x0 = static_cast<int>(std::floor(cx));
    const int y0 = static_cast<int>(std::floor(cy));
    const int x1 = std::min(x0 + 1, fmap.widthCells() - 1);
    const int y1 = std::min(y0 + 1, fmap.heightCells() - 1);
    const double fx = cx - x0;
    const double fy = cy - y0;
    const double w00 = (1 - fx) * (1 - fy);
    const double w10 = fx * (1 - fy);
    const double w01 = (1 - fx) * fy;
    const double w11 = fx * fy;
    for (int c = 0; c < fmap.channels(); ++c) {
        out[c] = w00 * fmap.at(x0, y0, c) + w10 * fmap.at(x1, y0, c) + w01 * fmap.at(x0, y1, c) +
                 w11 * fmap.at(x1, y1, c);
    }
}

std::vector<double> bilinearSample(const FeatureMap& fmap, Point p) {
    std::vector<double> out(fmap.channels());
    bilinearSample(fmap, p, out);
    return out;
}

}  // namespace roadgraph
