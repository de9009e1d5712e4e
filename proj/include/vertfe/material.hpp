#pragma once

#include <string>
#include <vector>

#include "vertfe/mesh.hpp"
#include "vertfe/voxel.hpp"

namespace vertfe {

enum class ModelVariant { Ensam, Lyon };

constexpr double kPmmaYoungsMpa = 2500.0;
constexpr double kPmmaPoisson = 0.3;
constexpr double kModulusSlope = 3230.0;      // MPa per g/cm^3
constexpr double kModulusIntercept = -34.7;   // MPa
constexpr double kModulusFloorMpa = 100.0;

struct MaterialOptions {
    ModelVariant variant = ModelVariant::Ensam;
    double floor_mpa = kModulusFloorMpa; // --no-floor-ensam drops this to 1 MPa
    double bin_step_mpa = 0.0;           // 0 disables binning
    double yield_strain = 0.007;         // Lyon plasticity
    double nu_override = -1.0;           // <0: use the variant default
};

/// Per-element elastic properties.
struct MaterialMap {
    ModelVariant variant = ModelVariant::Ensam;
    double yield_strain = 0.007;
    std::vector<double> bmd;      // g/cm^3, NaN for PMMA elements
    std::vector<double> e_raw;    // MPa before binning
    std::vector<double> youngs;   // MPa, binned + floored
    std::vector<double> poisson;
};

/// Mean density of the voxels whose centers fall inside each element;
/// elements carrying a source_voxel link use exactly that voxel. PMMA
/// elements are skipped (NaN).
std::vector<double> element_bmd(const Mesh& mesh, const VoxelGrid& grid);

/// E = max(3230*bmd - 34.7, floor).
double bmd_to_modulus(double bmd, double floor_mpa = kModulusFloorMpa);

/// Snap each modulus to the nearest multiple of `step` (ties round up),
/// then re-apply the floor.
std::vector<double> bin_materials(const std::vector<double>& e_list, double step,
                                  double floor_mpa = kModulusFloorMpa);

MaterialMap build_material_map(const Mesh& mesh, const VoxelGrid& grid,
                               const MaterialOptions& opts);

/// CSV dump: element_id,tag,bmd,E_raw,E_binned,nu
void save_materials_csv(const Mesh& mesh, const MaterialMap& map,
                        const std::string& path);

} // namespace vertfe
