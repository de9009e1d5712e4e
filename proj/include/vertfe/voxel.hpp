#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "vertfe/error.hpp"

namespace vertfe {

enum class GridKind { Grey, Density };

/// Regular axis-aligned 3D scalar field. `origin` is the position of the
/// low corner of voxel (0,0,0); voxel (i,j,k) spans
/// [origin + (i,j,k)*spacing, origin + (i+1,j+1,k+1)*spacing).
/// Values are stored x-fastest: index = i + nx*(j + ny*k).
struct VoxelGrid {
    std::array<int, 3> dims{0, 0, 0};
    std::array<double, 3> spacing{1.0, 1.0, 1.0}; // mm
    std::array<double, 3> origin{0.0, 0.0, 0.0};  // mm
    GridKind kind = GridKind::Grey;
    std::vector<double> values;

    VoxelGrid() = default;
    VoxelGrid(std::array<int, 3> d, std::array<double, 3> sp,
              std::array<double, 3> org, GridKind k);

    std::size_t size() const {
        return static_cast<std::size_t>(dims[0]) * dims[1] * dims[2];
    }
    std::size_t index(int i, int j, int k) const {
        return static_cast<std::size_t>(i) +
               static_cast<std::size_t>(dims[0]) *
                   (static_cast<std::size_t>(j) +
                    static_cast<std::size_t>(dims[1]) * k);
    }
    double at(int i, int j, int k) const { return values[index(i, j, k)]; }
    double& at(int i, int j, int k) { return values[index(i, j, k)]; }

    double voxel_volume() const { return spacing[0] * spacing[1] * spacing[2]; }
    std::array<double, 3> voxel_center(int i, int j, int k) const {
        return {origin[0] + (i + 0.5) * spacing[0],
                origin[1] + (j + 0.5) * spacing[1],
                origin[2] + (k + 0.5) * spacing[2]};
    }
};

/// Linear grey -> density map: density = slope*grey + intercept.
struct DensityCalibration {
    double slope = 1.0;      // g/cm^3 per grey unit
    double intercept = 0.0;  // g/cm^3
};

/// Axis-aligned index-space box [lo, hi) with a known insert density,
/// used for phantom-based calibration.
struct RoiSample {
    std::array<int, 3> lo{0, 0, 0};
    std::array<int, 3> hi{0, 0, 0}; // exclusive
    double known_density = 0.0;     // g/cm^3
};

/// Least-squares line density = slope*grey + intercept through the
/// (mean grey of region, known density) pairs.
DensityCalibration calibrate_from_phantom(const VoxelGrid& grid,
                                          const std::vector<RoiSample>& samples);

/// Per-voxel affine map. Negative densities are kept; clamping is the
/// material module's business.
VoxelGrid apply_calibration(const VoxelGrid& grid, const DensityCalibration& cal);

/// Box-average resampling to a coarser spacing. Each output voxel is the
/// volume-weighted mean of the input voxels it overlaps; the output covers
/// the same physical extent (a partial last cell averages over its overlap
/// with the grid only).
VoxelGrid downsample(const VoxelGrid& grid, std::array<double, 3> target_spacing);

double roi_mean(const VoxelGrid& grid, const RoiSample& roi);

// ---------------------------------------------------------------------------
// vgrid file format: one UTF-8 JSON header line, '\n', then the raw
// little-endian payload, x-fastest. Scalar type is float32le for grids and
// uint8 {0,1} for masks (see segment.hpp). Round-trips bit-exactly.
// ---------------------------------------------------------------------------

void save_vgrid(const VoxelGrid& grid, const std::string& path);
VoxelGrid load_vgrid(const std::string& path);

} // namespace vertfe
