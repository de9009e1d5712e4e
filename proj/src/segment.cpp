#include "vertfe/segment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <vector>

#include <nlohmann/json.hpp>

namespace vertfe {

using json = nlohmann::json;

std::size_t VoxelMask::count() const {
    return static_cast<std::size_t>(
        std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

VoxelMask threshold_mask(const VoxelGrid& grid, double tau) {
    if (!std::isfinite(tau)) fail_data("BadThreshold", "threshold must be finite");
    VoxelMask m;
    m.dims = grid.dims;
    m.spacing = grid.spacing;
    m.origin = grid.origin;
    m.bits.resize(grid.size());
    for (std::size_t i = 0; i < grid.values.size(); ++i)
        m.bits[i] = grid.values[i] >= tau ? 1 : 0;
    return m;
}

namespace {

// 6 face neighbors first so Face6 is a prefix of Vertex26.
std::vector<std::array<int, 3>> neighbor_offsets(Connectivity conn) {
    std::vector<std::array<int, 3>> offs = {{-1, 0, 0}, {1, 0, 0}, {0, -1, 0},
                                            {0, 1, 0},  {0, 0, -1}, {0, 0, 1}};
    if (conn == Connectivity::Vertex26) {
        for (int dz = -1; dz <= 1; ++dz)
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    const int ax = std::abs(dx) + std::abs(dy) + std::abs(dz);
                    if (ax >= 2) offs.push_back({dx, dy, dz});
                }
    }
    return offs;
}

} // namespace

VoxelMask largest_component(const VoxelMask& mask, Connectivity conn) {
    const auto offs = neighbor_offsets(conn);
    const int nx = mask.dims[0], ny = mask.dims[1], nz = mask.dims[2];

    std::vector<std::int32_t> label(mask.size(), -1);
    std::size_t best_count = 0;
    std::int32_t best_label = -1;
    std::int32_t next = 0;
    std::vector<std::size_t> stack;

    // Seeds scanned in ascending linear index: the first label reaching the
    // maximum count wins, which is exactly the smallest-seed tie rule.
    for (std::size_t seed = 0; seed < mask.size(); ++seed) {
        if (!mask.bits[seed] || label[seed] >= 0) continue;
        const std::int32_t lab = next++;
        std::size_t cnt = 0;
        stack.assign(1, seed);
        label[seed] = lab;
        while (!stack.empty()) {
            const std::size_t cur = stack.back();
            stack.pop_back();
            ++cnt;
            const int i = static_cast<int>(cur % nx);
            const int j = static_cast<int>((cur / nx) % ny);
            const int k = static_cast<int>(cur / (static_cast<std::size_t>(nx) * ny));
            for (const auto& o : offs) {
                const int ii = i + o[0], jj = j + o[1], kk = k + o[2];
                if (ii < 0 || jj < 0 || kk < 0 || ii >= nx || jj >= ny || kk >= nz)
                    continue;
                const std::size_t nidx = mask.index(ii, jj, kk);
                if (mask.bits[nidx] && label[nidx] < 0) {
                    label[nidx] = lab;
                    stack.push_back(nidx);
                }
            }
        }
        if (cnt > best_count) {
            best_count = cnt;
            best_label = lab;
        }
    }
    if (best_label < 0)
        fail_data("EmptyMask", "segmentation produced an empty mask");

    VoxelMask out = mask;
    for (std::size_t i = 0; i < out.bits.size(); ++i)
        out.bits[i] = (label[i] == best_label) ? 1 : 0;
    return out;
}

namespace {

std::vector<std::array<int, 3>> ball_offsets(int radius) {
    std::vector<std::array<int, 3>> offs;
    const int r2 = radius * radius;
    for (int dz = -radius; dz <= radius; ++dz)
        for (int dy = -radius; dy <= radius; ++dy)
            for (int dx = -radius; dx <= radius; ++dx)
                if (dx * dx + dy * dy + dz * dz <= r2) offs.push_back({dx, dy, dz});
    return offs;
}

} // namespace

VoxelMask close_mask(const VoxelMask& mask, int radius_vox) {
    if (radius_vox < 0) fail_data("BadRadius", "closing radius must be >= 0");
    if (radius_vox == 0) return mask;
    const auto offs = ball_offsets(radius_vox);
    const int nx = mask.dims[0], ny = mask.dims[1], nz = mask.dims[2];

    VoxelMask dil = mask;
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                bool hit = false;
                for (const auto& o : offs) {
                    const int ii = i + o[0], jj = j + o[1], kk = k + o[2];
                    if (ii < 0 || jj < 0 || kk < 0 || ii >= nx || jj >= ny || kk >= nz)
                        continue; // outside = background for dilation
                    if (mask.at(ii, jj, kk)) {
                        hit = true;
                        break;
                    }
                }
                dil.bits[dil.index(i, j, k)] = hit ? 1 : 0;
            }

    VoxelMask out = mask;
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                bool all = true;
                for (const auto& o : offs) {
                    const int ii = i + o[0], jj = j + o[1], kk = k + o[2];
                    if (ii < 0 || jj < 0 || kk < 0 || ii >= nx || jj >= ny || kk >= nz)
                        continue; // outside = foreground for erosion
                    if (!dil.at(ii, jj, kk)) {
                        all = false;
                        break;
                    }
                }
                out.bits[out.index(i, j, k)] = all ? 1 : 0;
            }
    return out;
}

void save_mask(const VoxelMask& mask, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) fail_data("OutputNotWritable", "cannot open " + path + " for writing");
    json h;
    h["dims"] = mask.dims;
    h["kind"] = "mask";
    h["origin_mm"] = mask.origin;
    h["scalar"] = "uint8";
    h["spacing_mm"] = mask.spacing;
    os << h.dump() << "\n";
    os.write(reinterpret_cast<const char*>(mask.bits.data()),
             static_cast<std::streamsize>(mask.bits.size()));
    if (!os) fail_data("OutputNotWritable", "short write to " + path);
}

VoxelMask load_mask(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) fail_data("InputNotFound", "cannot open " + path);
    std::string line;
    if (!std::getline(is, line)) fail_data("BadVgrid", "missing header in " + path);
    json h = json::parse(line, nullptr, false);
    if (h.is_discarded()) fail_data("BadVgrid", "malformed header in " + path);
    if (h.at("kind").get<std::string>() != "mask" ||
        h.at("scalar").get<std::string>() != "uint8")
        fail_data("BadVgrid", path + " is not a mask vgrid");

    VoxelMask m;
    m.dims = h.at("dims").get<std::array<int, 3>>();
    m.spacing = h.at("spacing_mm").get<std::array<double, 3>>();
    m.origin = h.at("origin_mm").get<std::array<double, 3>>();
    m.bits.resize(m.size());
    is.read(reinterpret_cast<char*>(m.bits.data()),
            static_cast<std::streamsize>(m.bits.size()));
    if (static_cast<std::size_t>(is.gcount()) != m.bits.size())
        fail_data("BadVgrid", "truncated payload in " + path);
    for (auto& b : m.bits)
        if (b > 1) fail_data("BadVgrid", "mask payload must be {0,1}");
    return m;
}

} // namespace vertfe
