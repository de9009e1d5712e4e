#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "vertfe/segment.hpp"
#include "vertfe/voxel.hpp"

namespace vertfe {

enum class ElemKind : std::uint8_t { Hex8, Tet10 };
enum class ElemTag : std::uint8_t { Bone, Pmma };

inline int nodes_per_elem(ElemKind k) { return k == ElemKind::Hex8 ? 8 : 10; }

struct Element {
    ElemKind kind = ElemKind::Hex8;
    ElemTag tag = ElemTag::Bone;
    std::array<int, 10> nodes{}; // first 8 used for Hex8
    long long source_voxel = -1; // linear index into the source grid, -1 if none
};

enum class Axis : int { X = 0, Y = 1, Z = 2 };

/// Axial direction plus a signed anterior axis (must differ from axial).
/// The remaining axis is left-right.
struct Orientation {
    Axis axial = Axis::Z;
    Axis anterior_axis = Axis::Y;
    int anterior_sign = +1;

    int axial_i() const { return static_cast<int>(axial); }
    int anterior_i() const { return static_cast<int>(anterior_axis); }
    int lateral_i() const { return 3 - axial_i() - anterior_i(); }
    void validate() const;
};

/// Conforming FE mesh: shared faces between neighbors carry identical node
/// sets, all Jacobians positive. Node coordinates in mm.
struct Mesh {
    std::vector<std::array<double, 3>> nodes;
    std::vector<Element> elements;
    std::map<std::string, std::vector<int>> node_sets;

    // source-grid provenance for voxel-derived meshes
    bool has_grid = false;
    std::array<int, 3> grid_dims{0, 0, 0};
    std::array<double, 3> grid_spacing{1.0, 1.0, 1.0};
    std::array<double, 3> grid_origin{0.0, 0.0, 0.0};

    int n_nodes() const { return static_cast<int>(nodes.size()); }
    int n_elements() const { return static_cast<int>(elements.size()); }
    double element_volume(int e) const;
    std::array<double, 3> element_centroid(int e) const;
    /// Axis-aligned bounds of the Bone-tagged elements' nodes.
    void bone_bounds(std::array<double, 3>& lo, std::array<double, 3>& hi) const;
    double bone_axial_height(const Orientation& orient) const;
};

/// One Hex8 per set voxel; corner nodes shared between neighbors.
Mesh hex_mesh_from_mask(const VoxelGrid& grid, const VoxelMask& mask);

/// Kuhn 6-tetrahedron split of each set voxel with a globally consistent
/// diagonal (conforming across voxel faces), elevated to Tet10 with shared
/// midside nodes at the edge midpoints.
Mesh tet_mesh_from_mask(const VoxelGrid& grid, const VoxelMask& mask);

/// Boundary-surface nodes within band_fraction of the axial extent of the
/// minimum (inferior) / maximum (superior).
struct EndplateSets {
    std::vector<int> inferior;
    std::vector<int> superior;
};
EndplateSets detect_endplates(const Mesh& mesh, const Orientation& orient,
                              double band_fraction);

/// Extrude PMMA cap layers axially above the topmost and below the lowest
/// set voxel of every (transverse) voxel column. Adds node sets
/// "pmma_bottom" / "pmma_top" holding the outermost cap faces.
Mesh extrude_pmma(const Mesh& mesh, const Orientation& orient, double thickness_mm);

/// Load application point: axial coordinate at the superior (loaded) face,
/// left-right at the bone centroid, anterior-posterior one third of the A-P
/// extent away from the anterior margin.
std::array<double, 3> anterior_third_point(const Mesh& mesh, const Orientation& orient);

// Documented ASCII export (counts header, "id x y z" node lines,
// "id kind tag n0..nK" element lines, node-set blocks). Bit-exact text.
void save_mesh_ascii(const Mesh& mesh, const std::string& path);

} // namespace vertfe
