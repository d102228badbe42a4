#include "roadgraph/dataset.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "roadgraph/error.hpp"
#include "roadgraph/parallel.hpp"

namespace roadgraph {

void writeMeta(const std::filesystem::path& path, const DatasetMeta& meta) {
    std::ofstream out(path);
    require(static_cast<bool>(out), ErrorCode::Io, "cannot write " + path.string());
    out << "image_width = " << meta.imageWidth << '\n'
        << "image_height = " << meta.imageHeight << '\n'
        << "window_size = " << meta.windowSize << '\n'
        << "count_x = " << meta.countX << '\n'
        << "count_y = " << meta.countY << '\n'
        << "feature_scale = " << meta.featureScale << '\n';
    require(static_cast<bool>(out), ErrorCode::Io, "write failed: " + path.string());
}

DatasetMeta readMeta(const std::filesystem::path& path) {
    std::ifstream in(path);
    require(static_cast<bool>(in), ErrorCode::Io, "cannot read " + path.string());
    std::map<std::string, int> values;
    std::string line;
    int lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto eq = line.find('=');
        require(eq != std::string::npos, ErrorCode::Format, path.string() + ":" + std::to_string(lineNo) + ": expected key = value");
        std::istringstream key(line.substr(0, eq)), value(line.substr(eq + 1));
        std::string k;
        int v = 0;
        key >> k;
        require(static_cast<bool>(value >> v), ErrorCode::Format,
                path.string() + ":" + std::to_string(lineNo) + ": value of '" + k + "' is not an integer");
        values[k] = v;
    }
    auto get = [&](const char* k) {
        const auto it = values.find(k);
        require(it != values.end(), ErrorCode::Format, path.string() + ": missing '" + k + "'");
        return it->second;
    };
    DatasetMeta m;
    m.imageWidth = get("image_width");
    m.imageHeight = get("image_height");
    m.windowSize = get("window_size");
    m.countX = get("count_x");
    m.countY = get("count_y");
    m.featureScale = values.count("feature_scale") ? values["feature_scale"] : 16;
    require(m.imageWidth > 0 && m.imageHeight > 0 && m.windowSize > 0 && m.countX > 0 && m.countY > 0 &&
                m.featureScale > 0,
            ErrorCode::Format, path.string() + ": values must be positive");
    return m;
}

std::filesystem::path windowFile(const std::filesystem::path& dir, const std::string& sub, int ix, int iy) {
    return dir / sub / ("win_" + std::to_string(ix) + "_" + std::to_string(iy) + ".rgt");
}

void writeDataset(const std::filesystem::path& dir, const ProbMask& fullMask, const DatasetMeta& meta,
                  const EncoderOptions& encoder, const RoadGraph* graph, int threads) {
    require(fullMask.width() == meta.imageWidth && fullMask.height() == meta.imageHeight, ErrorCode::Shape,
            "mask extent does not match the dataset meta");
    const WindowGrid grid = meta.grid();
    std::error_code ec;
    std::filesystem::create_directories(dir / "masks", ec);
    std::filesystem::create_directories(dir / "feats", ec);
    require(!ec, ErrorCode::Io, "cannot create dataset directories under " + dir.string());
    writeMeta(dir / "meta.txt", meta);
    if (graph) saveGraph(dir / "graph.json", *graph);
    EncoderOptions opts = encoder;
    opts.scale = meta.featureScale;
    parallelFor(grid.windowCount(), threads, [&](std::size_t w) {
        const int ix = static_cast<int>(w % grid.countX);
        const int iy = static_cast<int>(w / grid.countX);
        const ProbMask m = fullMask.crop(grid.originX(ix), grid.originY(iy), grid.windowSize, grid.windowSize);
        saveTensor(windowFile(dir, "masks", ix, iy), m.toTensor());
        saveTensor(windowFile(dir, "feats", ix, iy), analyticEncoder(m, opts).toTensor());
    });
}

WindowSource datasetWindowSource(const std::filesystem::path& dir, const DatasetMeta& meta) {
    WindowSource src;
    src.mask = [dir](int ix, int iy) { return ProbMask::fromTensor(loadTensor(windowFile(dir, "masks", ix, iy))); };
    const int scale = meta.featureScale;
    src.features = [dir, scale](int ix, int iy) {
        return FeatureMap::fromTensor(loadTensor(windowFile(dir, "feats", ix, iy)), scale);
    };
    return src;
}

}  // namespace roadgraph
