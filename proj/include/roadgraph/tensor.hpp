#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "roadgraph/geometry.hpp"

namespace roadgraph {

/// Element type codes of the RGT1 container.
enum class DType : std::uint32_t {
    Float32 = 0,
    Float64 = 1,
};

/// Dense row-major tensor. Values are held as double in memory; the dtype
/// only governs the on-disk width.
struct Tensor {
    DType dtype{DType::Float32};
    std::vector<std::uint64_t> dims;
    std::vector<double> values;

    std::uint64_t elementCount() const;
};

/// RGT1 layout (little-endian): "RGT1", u32 dtype, u32 ndim, ndim x u64 dims,
/// row-major payload.
void writeTensor(std::ostream& out, const Tensor& t);
Tensor readTensor(std::istream& in, const std::string& what = "tensor");
void saveTensor(const std::filesystem::path& path, const Tensor& t);
Tensor loadTensor(const std::filesystem::path& path);

/// Two-channel (road, intersection) probability raster, channel-last.
class ProbMask {
public:
    static constexpr int kRoad = 0;
    static constexpr int kIntersection = 1;

    ProbMask() = default;
    ProbMask(int width, int height);

    int width() const { return width_; }
    int height() const { return height_; }

    float at(int x, int y, int channel) const { return data_[index(x, y, channel)]; }
    float& at(int x, int y, int channel) { return data_[index(x, y, channel)]; }

    std::span<const float> data() const { return data_; }
    std::span<float> data() { return data_; }

    /// Throws Error(Contract) if any value leaves [0,1].
    void validate() const;

    Tensor toTensor() const;
    static ProbMask fromTensor(const Tensor& t);

    /// Copy of the pixels [x, x+w) x [y, y+h); must lie inside the mask.
    ProbMask crop(int x, int y, int w, int h) const;

    friend bool operator==(const ProbMask&, const ProbMask&) = default;

private:
    std::size_t index(int x, int y, int c) const {
        return (static_cast<std::size_t>(y) * width_ + x) * 2 + c;
    }

    int width_{0};
    int height_{0};
    std::vector<float> data_;
};

/// Dense feature raster at 1/scale of the window resolution, channel-last.
class FeatureMap {
public:
    FeatureMap() = default;
    FeatureMap(int widthCells, int heightCells, int channels, int scale = 16);

    int widthCells() const { return widthF_; }
    int heightCells() const { return heightF_; }
    int channels() const { return channels_; }
    int scale() const { return scale_; }

    /// Continuous pixel extent covered by the window: [-0.5, cells*scale - 0.5].
    Rect windowExtent() const;

    float at(int cx, int cy, int c) const { return data_[index(cx, cy, c)]; }
    float& at(int cx, int cy, int c) { return data_[index(cx, cy, c)]; }

    std::span<const float> data() const { return data_; }
    std::span<float> data() { return data_; }

    Tensor toTensor() const;
    static FeatureMap fromTensor(const Tensor& t, int scale = 16);

    friend bool operator==(const FeatureMap&, const FeatureMap&) = default;

private:
    std::size_t index(int cx, int cy, int c) const {
        return (static_cast<std::size_t>(cy) * widthF_ + cx) * channels_ + c;
    }

    int widthF_{0};
    int heightF_{0};
    int channels_{0};
    int scale_{16};
    std::vector<float> data_;
};

/// Bilinear interpolation at window pixel `p`. Pixel p maps to cell coordinate
/// p/scale - 0.5; coordinates beyond the outermost cell centers clamp to the
/// border cell. Throws Error(Contract) when p is outside windowExtent().
void bilinearSample(const FeatureMap& fmap, Point p, std::span<double> out);
std::vector<double> bilinearSample(const FeatureMap& fmap, Point p);

}  // namespace roadgraph
