#include "vertfe/voxel.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace vertfe {

using json = nlohmann::json;

VoxelGrid::VoxelGrid(std::array<int, 3> d, std::array<double, 3> sp,
                     std::array<double, 3> org, GridKind k)
    : dims(d), spacing(sp), origin(org), kind(k) {
    for (int a = 0; a < 3; ++a) {
        if (dims[a] < 1) fail_data("BadGridDims", "grid dims must be >= 1");
        if (!(spacing[a] > 0.0)) fail_data("BadGridSpacing", "grid spacing must be > 0");
    }
    values.assign(size(), 0.0);
}

double roi_mean(const VoxelGrid& grid, const RoiSample& roi) {
    for (int a = 0; a < 3; ++a) {
        if (roi.lo[a] < 0 || roi.hi[a] > grid.dims[a] || roi.lo[a] >= roi.hi[a])
            fail_data("BadRoi", "ROI region empty or outside the grid");
    }
    double sum = 0.0;
    std::size_t n = 0;
    for (int k = roi.lo[2]; k < roi.hi[2]; ++k)
        for (int j = roi.lo[1]; j < roi.hi[1]; ++j)
            for (int i = roi.lo[0]; i < roi.hi[0]; ++i) {
                sum += grid.at(i, j, k);
                ++n;
            }
    return sum / static_cast<double>(n);
}

DensityCalibration calibrate_from_phantom(const VoxelGrid& grid,
                                          const std::vector<RoiSample>& samples) {
    if (grid.kind != GridKind::Grey)
        fail_data("WrongKind", "calibration expects a grey-value grid");
    if (samples.size() < 2)
        fail_data("FewerThanTwoSamples", "phantom calibration needs at least 2 ROI samples");

    std::vector<double> gx, dy;
    gx.reserve(samples.size());
    dy.reserve(samples.size());
    for (const auto& s : samples) {
        if (s.known_density < 0.0)
            fail_data("BadRoi", "insert density must be >= 0");
        gx.push_back(roi_mean(grid, s));
        dy.push_back(s.known_density);
    }

    const double n = static_cast<double>(gx.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < gx.size(); ++i) {
        mx += gx[i];
        my += dy[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < gx.size(); ++i) {
        sxx += (gx[i] - mx) * (gx[i] - mx);
        sxy += (gx[i] - mx) * (dy[i] - my);
    }
    if (sxx == 0.0)
        fail_data("DegenerateFit", "all ROI mean grey values are equal");

    DensityCalibration cal;
    cal.slope = sxy / sxx;
    cal.intercept = my - cal.slope * mx;
    if (!std::isfinite(cal.slope) || cal.slope <= 0.0)
        fail_data("DegenerateFit", "fitted slope is not finite and positive");
    return cal;
}

VoxelGrid apply_calibration(const VoxelGrid& grid, const DensityCalibration& cal) {
    if (grid.kind != GridKind::Grey)
        fail_data("WrongKind", "apply_calibration expects a grey-value grid");
    VoxelGrid out = grid;
    out.kind = GridKind::Density;
    for (auto& v : out.values) v = cal.slope * v + cal.intercept;
    return out;
}

namespace {

// Per-axis overlap segments between output cell J (width T) and the input
// cells (width s), clipped to the grid extent.
struct AxisSegments {
    int n_out = 0;
    std::vector<std::vector<std::pair<int, double>>> per_out; // (in index, width)
};

AxisSegments axis_overlaps(int n_in, double s, double t) {
    AxisSegments a;
    const double extent = n_in * s;
    a.n_out = static_cast<int>(std::ceil(extent / t - 1e-12));
    a.per_out.resize(a.n_out);
    for (int J = 0; J < a.n_out; ++J) {
        const double lo = J * t;
        const double hi = std::min((J + 1) * t, extent);
        int i0 = std::max(0, static_cast<int>(std::floor(lo / s + 1e-12)));
        int i1 = std::min(n_in - 1, static_cast<int>(std::ceil(hi / s - 1e-12)) - 1);
        for (int i = i0; i <= i1; ++i) {
            const double w = std::min(hi, (i + 1) * s) - std::max(lo, i * s);
            if (w > 0.0) a.per_out[J].push_back({i, w});
        }
    }
    return a;
}

} // namespace

VoxelGrid downsample(const VoxelGrid& grid, std::array<double, 3> target_spacing) {
    for (int a = 0; a < 3; ++a) {
        if (target_spacing[a] < grid.spacing[a] * (1.0 - 1e-12))
            fail_data("UpsampleRequested",
                      "target spacing must be >= source spacing on every axis");
    }
    if (target_spacing == grid.spacing) return grid; // identity, bit-exact

    const AxisSegments ax = axis_overlaps(grid.dims[0], grid.spacing[0], target_spacing[0]);
    const AxisSegments ay = axis_overlaps(grid.dims[1], grid.spacing[1], target_spacing[1]);
    const AxisSegments az = axis_overlaps(grid.dims[2], grid.spacing[2], target_spacing[2]);

    VoxelGrid out({ax.n_out, ay.n_out, az.n_out}, target_spacing, grid.origin, grid.kind);
    for (int K = 0; K < az.n_out; ++K)
        for (int J = 0; J < ay.n_out; ++J)
            for (int I = 0; I < ax.n_out; ++I) {
                double acc = 0.0, wtot = 0.0;
                for (const auto& [k, wz] : az.per_out[K])
                    for (const auto& [j, wy] : ay.per_out[J])
                        for (const auto& [i, wx] : ax.per_out[I]) {
                            const double w = wx * wy * wz;
                            acc += w * grid.at(i, j, k);
                            wtot += w;
                        }
                out.at(I, J, K) = acc / wtot;
            }
    return out;
}

// ---------------------------------------------------------------------------
// vgrid I/O
// ---------------------------------------------------------------------------

namespace {

const char* kind_name(GridKind k) {
    return k == GridKind::Grey ? "grey" : "density_g_cm3";
}

void write_header(std::ostream& os, const std::array<int, 3>& dims,
                  const std::array<double, 3>& spacing,
                  const std::array<double, 3>& origin, const char* kind,
                  const char* scalar) {
    json h;
    h["dims"] = dims;
    h["kind"] = kind;
    h["origin_mm"] = origin;
    h["scalar"] = scalar;
    h["spacing_mm"] = spacing;
    os << h.dump() << "\n";
}

json read_header(std::istream& is, const std::string& path) {
    std::string line;
    if (!std::getline(is, line))
        fail_data("BadVgrid", "missing vgrid header line in " + path);
    json h = json::parse(line, nullptr, false);
    if (h.is_discarded())
        fail_data("BadVgrid", "malformed vgrid header in " + path);
    return h;
}

} // namespace

void save_vgrid(const VoxelGrid& grid, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) fail_data("OutputNotWritable", "cannot open " + path + " for writing");
    write_header(os, grid.dims, grid.spacing, grid.origin, kind_name(grid.kind),
                 "float32le");
    std::vector<float> payload(grid.values.begin(), grid.values.end());
    os.write(reinterpret_cast<const char*>(payload.data()),
             static_cast<std::streamsize>(payload.size() * sizeof(float)));
    if (!os) fail_data("OutputNotWritable", "short write to " + path);
}

VoxelGrid load_vgrid(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) fail_data("InputNotFound", "cannot open " + path);
    json h = read_header(is, path);

    std::array<int, 3> dims = h.at("dims").get<std::array<int, 3>>();
    std::array<double, 3> spacing = h.at("spacing_mm").get<std::array<double, 3>>();
    std::array<double, 3> origin = h.at("origin_mm").get<std::array<double, 3>>();
    const std::string kind = h.at("kind").get<std::string>();
    const std::string scalar = h.at("scalar").get<std::string>();
    if (scalar != "float32le")
        fail_data("BadVgrid", "expected float32le payload in " + path);

    GridKind gk;
    if (kind == "grey")
        gk = GridKind::Grey;
    else if (kind == "density_g_cm3")
        gk = GridKind::Density;
    else
        fail_data("BadVgrid", "unknown grid kind '" + kind + "' in " + path);

    VoxelGrid grid(dims, spacing, origin, gk);
    std::vector<float> payload(grid.size());
    is.read(reinterpret_cast<char*>(payload.data()),
            static_cast<std::streamsize>(payload.size() * sizeof(float)));
    if (static_cast<std::size_t>(is.gcount()) != payload.size() * sizeof(float))
        fail_data("BadVgrid", "truncated payload in " + path);
    std::copy(payload.begin(), payload.end(), grid.values.begin());
    return grid;
}

} // namespace vertfe
