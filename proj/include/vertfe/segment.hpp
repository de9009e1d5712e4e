#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "vertfe/voxel.hpp"

namespace vertfe {

enum class Connectivity { Face6, Vertex26 };

/// Boolean voxel mask sharing the geometry of its source grid.
struct VoxelMask {
    std::array<int, 3> dims{0, 0, 0};
    std::array<double, 3> spacing{1.0, 1.0, 1.0};
    std::array<double, 3> origin{0.0, 0.0, 0.0};
    std::vector<std::uint8_t> bits;

    std::size_t size() const {
        return static_cast<std::size_t>(dims[0]) * dims[1] * dims[2];
    }
    std::size_t index(int i, int j, int k) const {
        return static_cast<std::size_t>(i) +
               static_cast<std::size_t>(dims[0]) *
                   (static_cast<std::size_t>(j) +
                    static_cast<std::size_t>(dims[1]) * k);
    }
    bool at(int i, int j, int k) const { return bits[index(i, j, k)] != 0; }
    std::size_t count() const;
};

/// bit set iff density >= tau.
VoxelMask threshold_mask(const VoxelGrid& grid, double tau);

/// Keep only the largest connected component ("island removal"). Ties are
/// broken by the smallest linear index contained in the component.
VoxelMask largest_component(const VoxelMask& mask, Connectivity conn);

/// Morphological closing (dilate then erode) with a discrete ball
/// {o : |o|^2 <= r^2}. radius 0 is the identity. Outside the grid counts as
/// background for dilation and as foreground for erosion, so closing is
/// extensive everywhere.
VoxelMask close_mask(const VoxelMask& mask, int radius_vox);

// vgrid container with kind=Mask, payload uint8 {0,1}.
void save_mask(const VoxelMask& mask, const std::string& path);
VoxelMask load_mask(const std::string& path);

} // namespace vertfe
