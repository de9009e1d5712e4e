#include "vertfe/material.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace vertfe {

std::vector<double> element_bmd(const Mesh& mesh, const VoxelGrid& grid) {
    if (grid.kind != GridKind::Density)
        fail_data("WrongKind", "element_bmd expects a density grid");
    std::vector<double> bmd(mesh.n_elements(),
                            std::numeric_limits<double>::quiet_NaN());

    for (int e = 0; e < mesh.n_elements(); ++e) {
        const Element& el = mesh.elements[e];
        if (el.tag == ElemTag::Pmma) continue;

        if (el.source_voxel >= 0 &&
            el.source_voxel < static_cast<long long>(grid.size())) {
            bmd[e] = grid.values[static_cast<std::size_t>(el.source_voxel)];
            continue;
        }

        // Generic path: mean of the voxels whose centers fall inside the
        // element's half-open bounding box (exact for axis-aligned hexes).
        std::array<double, 3> lo{1e300, 1e300, 1e300}, hi{-1e300, -1e300, -1e300};
        const int nn = nodes_per_elem(el.kind);
        for (int i = 0; i < nn; ++i)
            for (int a = 0; a < 3; ++a) {
                lo[a] = std::min(lo[a], mesh.nodes[el.nodes[i]][a]);
                hi[a] = std::max(hi[a], mesh.nodes[el.nodes[i]][a]);
            }
        int i0[3], i1[3];
        for (int a = 0; a < 3; ++a) {
            // first voxel whose center >= lo, last whose center < hi
            i0[a] = static_cast<int>(
                std::ceil((lo[a] - grid.origin[a]) / grid.spacing[a] - 0.5));
            i1[a] = static_cast<int>(
                std::ceil((hi[a] - grid.origin[a]) / grid.spacing[a] - 0.5)) - 1;
            i0[a] = std::max(i0[a], 0);
            i1[a] = std::min(i1[a], grid.dims[a] - 1);
        }
        double sum = 0.0;
        std::size_t n = 0;
        for (int k = i0[2]; k <= i1[2]; ++k)
            for (int j = i0[1]; j <= i1[1]; ++j)
                for (int i = i0[0]; i <= i1[0]; ++i) {
                    sum += grid.at(i, j, k);
                    ++n;
                }
        if (n == 0)
            fail_data("NoVoxelInElement",
                      "element " + std::to_string(e) + " contains no voxel center");
        bmd[e] = sum / static_cast<double>(n);
    }
    return bmd;
}

double bmd_to_modulus(double bmd, double floor_mpa) {
    if (!std::isfinite(bmd)) fail_data("BadBmd", "BMD must be finite");
    return std::max(kModulusSlope * bmd + kModulusIntercept, floor_mpa);
}

std::vector<double> bin_materials(const std::vector<double>& e_list, double step,
                                  double floor_mpa) {
    if (!(step > 0.0)) fail_data("BadBinStep", "bin step must be > 0");
    std::vector<double> out(e_list.size());
    for (std::size_t i = 0; i < e_list.size(); ++i) {
        const double binned = std::floor(e_list[i] / step + 0.5) * step; // ties up
        out[i] = std::max(binned, floor_mpa);
    }
    return out;
}

MaterialMap build_material_map(const Mesh& mesh, const VoxelGrid& grid,
                               const MaterialOptions& opts) {
    MaterialMap map;
    map.variant = opts.variant;
    map.yield_strain = opts.yield_strain;
    map.bmd = element_bmd(mesh, grid);
    map.e_raw.resize(mesh.n_elements());
    map.youngs.resize(mesh.n_elements());
    map.poisson.resize(mesh.n_elements());

    double nu_bone = opts.variant == ModelVariant::Ensam ? 0.4 : 0.3;
    if (opts.nu_override >= 0.0) nu_bone = opts.nu_override;
    if (!(nu_bone > 0.0) || !(nu_bone < 0.5))
        fail_data("BadPoisson", "bone Poisson ratio must lie in (0, 0.5)");

    for (int e = 0; e < mesh.n_elements(); ++e) {
        if (mesh.elements[e].tag == ElemTag::Pmma) {
            map.e_raw[e] = kPmmaYoungsMpa;
            map.youngs[e] = kPmmaYoungsMpa;
            map.poisson[e] = kPmmaPoisson;
            continue;
        }
        map.e_raw[e] = bmd_to_modulus(map.bmd[e], opts.floor_mpa);
        map.youngs[e] = map.e_raw[e];
        map.poisson[e] = nu_bone;
    }
    if (opts.bin_step_mpa > 0.0) {
        std::vector<double> bone_e;
        bone_e.reserve(mesh.n_elements());
        for (int e = 0; e < mesh.n_elements(); ++e) bone_e.push_back(map.e_raw[e]);
        const auto binned = bin_materials(bone_e, opts.bin_step_mpa, opts.floor_mpa);
        for (int e = 0; e < mesh.n_elements(); ++e)
            if (mesh.elements[e].tag == ElemTag::Bone) map.youngs[e] = binned[e];
    }
    return map;
}

void save_materials_csv(const Mesh& mesh, const MaterialMap& map,
                        const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) fail_data("OutputNotWritable", "cannot open " + path + " for writing");
    std::fprintf(f, "element_id,tag,bmd,E_raw,E_binned,nu\n");
    for (int e = 0; e < mesh.n_elements(); ++e) {
        const bool pmma = mesh.elements[e].tag == ElemTag::Pmma;
        std::fprintf(f, "%d,%s,", e, pmma ? "pmma" : "bone");
        if (pmma)
            std::fprintf(f, ",");
        else
            std::fprintf(f, "%.17g,", map.bmd[e]);
        std::fprintf(f, "%.17g,%.17g,%.17g\n", map.e_raw[e], map.youngs[e],
                     map.poisson[e]);
    }
    std::fclose(f);
}

} // namespace vertfe
