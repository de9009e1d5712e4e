#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "vertfe/stats.hpp"
#include "vertfe/voxel.hpp"

namespace vertfe {

enum class PhantomShape { Column, EllipticCylinderWithShell };

/// Synthetic specimen description. The generated grey grid encodes density
/// through the documented (grey_slope, grey_intercept) line; calibration
/// inserts sit in a reserved corner strip, disjoint from the body.
struct PhantomSpec {
    PhantomShape shape = PhantomShape::Column;
    std::array<double, 3> body_mm{12.0, 12.0, 24.0}; // body extent (x,y,z), z axial
    std::array<double, 3> spacing_mm{1.0, 1.0, 1.0};
    double margin_mm = 2.0;
    double core_density = 0.2;   // g/cm^3
    double shell_density = 0.6;
    double shell_thickness_mm = 1.5;
    std::vector<double> insert_densities{0.05, 0.1, 0.2, 0.4};
    int insert_size_vox = 3;
    double noise_sd = 0.0;       // grey units
    std::uint64_t seed = 1;
    double grey_slope = 0.001;   // density = slope*grey + intercept
    double grey_intercept = -0.1;
};

struct PhantomTruth {
    double slope = 0.0;
    double intercept = 0.0;
    std::vector<RoiSample> calibration_rois;
    std::array<int, 3> body_lo{0, 0, 0}; // body bounding box, voxel indices
    std::array<int, 3> body_hi{0, 0, 0}; // exclusive
    std::size_t body_voxel_count = 0;
    double core_density = 0.0;
    double shell_density = 0.0;
};

struct PhantomResult {
    VoxelGrid grid; // Grey
    PhantomTruth truth;
};

PhantomResult gen_phantom(const PhantomSpec& spec);

PhantomSpec phantom_spec_from_json_file(const std::string& path);
void save_phantom_truth(const PhantomTruth& truth, const std::string& path);

/// The embedded 28-record study dataset (experimental and numerical
/// failure loads per model/operator/trial).
StudyTable embedded_table1();

} // namespace vertfe
