#include "vertfe/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <unordered_map>

namespace vertfe {

void Orientation::validate() const {
    if (anterior_axis == axial)
        fail_data("BadOrientation", "anterior axis must differ from the axial axis");
    if (anterior_sign != 1 && anterior_sign != -1)
        fail_data("BadOrientation", "anterior sign must be +1 or -1");
}

namespace {

// Hex8 local corner offsets, matching the trilinear shape-function ordering.
constexpr int kHexCorner[8][3] = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
                                  {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};

// Tet10 midside -> corner pair, VTK ordering.
constexpr int kTetEdge[6][2] = {{0, 1}, {1, 2}, {0, 2}, {0, 3}, {1, 3}, {2, 3}};

// Kuhn split: one path per axis permutation, odd permutations swap the two
// intermediate vertices to keep the volume positive.
constexpr int kKuhnPerm[6][3] = {{0, 1, 2}, {1, 2, 0}, {2, 0, 1},
                                 {0, 2, 1}, {1, 0, 2}, {2, 1, 0}};
constexpr bool kKuhnOdd[6] = {false, false, false, true, true, true};

// Nodes are keyed on the doubled lattice so edge midpoints stay integral.
// Coordinates are always origin + key * (spacing/2), so shared nodes get
// bit-identical positions.
struct LatticeKey {
    long long packed;
};

long long pack_key(int i2, int j2, int k2) {
    const long long off = 1 << 20;
    return ((static_cast<long long>(k2) + off) << 42) |
           ((static_cast<long long>(j2) + off) << 21) |
           (static_cast<long long>(i2) + off);
}

class NodeBuilder {
public:
    NodeBuilder(std::array<double, 3> origin, std::array<double, 3> spacing,
                std::vector<std::array<double, 3>>& nodes)
        : origin_(origin), spacing_(spacing), nodes_(nodes) {}

    int get(int i2, int j2, int k2) {
        const long long key = pack_key(i2, j2, k2);
        auto it = map_.find(key);
        if (it != map_.end()) return it->second;
        const int id = static_cast<int>(nodes_.size());
        nodes_.push_back({origin_[0] + i2 * (0.5 * spacing_[0]),
                          origin_[1] + j2 * (0.5 * spacing_[1]),
                          origin_[2] + k2 * (0.5 * spacing_[2])});
        map_.emplace(key, id);
        return id;
    }

    /// Bind an existing node id to a lattice position (no node is created).
    void register_existing(int i2, int j2, int k2, int id) {
        map_.emplace(pack_key(i2, j2, k2), id);
    }

private:
    std::array<double, 3> origin_, spacing_;
    std::vector<std::array<double, 3>>& nodes_;
    std::unordered_map<long long, int> map_;
};

void check_mask_geometry(const VoxelGrid& grid, const VoxelMask& mask) {
    if (grid.dims != mask.dims || grid.spacing != mask.spacing ||
        grid.origin != mask.origin)
        fail_data("GeometryMismatch", "mask and grid geometry differ");
}

} // namespace

Mesh hex_mesh_from_mask(const VoxelGrid& grid, const VoxelMask& mask) {
    check_mask_geometry(grid, mask);
    Mesh mesh;
    mesh.has_grid = true;
    mesh.grid_dims = grid.dims;
    mesh.grid_spacing = grid.spacing;
    mesh.grid_origin = grid.origin;
    NodeBuilder nb(grid.origin, grid.spacing, mesh.nodes);

    const int nx = mask.dims[0], ny = mask.dims[1], nz = mask.dims[2];
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                if (!mask.at(i, j, k)) continue;
                Element e;
                e.kind = ElemKind::Hex8;
                e.tag = ElemTag::Bone;
                e.source_voxel = static_cast<long long>(mask.index(i, j, k));
                for (int c = 0; c < 8; ++c)
                    e.nodes[c] = nb.get(2 * (i + kHexCorner[c][0]),
                                        2 * (j + kHexCorner[c][1]),
                                        2 * (k + kHexCorner[c][2]));
                mesh.elements.push_back(e);
            }
    if (mesh.elements.empty()) fail_data("EmptyMask", "mask has no set voxels");
    return mesh;
}

Mesh tet_mesh_from_mask(const VoxelGrid& grid, const VoxelMask& mask) {
    check_mask_geometry(grid, mask);
    Mesh mesh;
    mesh.has_grid = true;
    mesh.grid_dims = grid.dims;
    mesh.grid_spacing = grid.spacing;
    mesh.grid_origin = grid.origin;
    NodeBuilder nb(grid.origin, grid.spacing, mesh.nodes);

    const int nx = mask.dims[0], ny = mask.dims[1], nz = mask.dims[2];
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                if (!mask.at(i, j, k)) continue;
                const long long src = static_cast<long long>(mask.index(i, j, k));
                for (int p = 0; p < 6; ++p) {
                    // Corner path 000 -> +e_a -> +e_b -> 111 on the doubled lattice.
                    int corner2[4][3];
                    corner2[0][0] = 2 * i;
                    corner2[0][1] = 2 * j;
                    corner2[0][2] = 2 * k;
                    for (int s = 0; s < 3; ++s) {
                        for (int a = 0; a < 3; ++a) corner2[s + 1][a] = corner2[s][a];
                        corner2[s + 1][kKuhnPerm[p][s]] += 2;
                    }
                    if (kKuhnOdd[p])
                        std::swap(corner2[1], corner2[2]);

                    Element e;
                    e.kind = ElemKind::Tet10;
                    e.tag = ElemTag::Bone;
                    e.source_voxel = src;
                    for (int c = 0; c < 4; ++c)
                        e.nodes[c] =
                            nb.get(corner2[c][0], corner2[c][1], corner2[c][2]);
                    for (int m = 0; m < 6; ++m) {
                        const int* ea = corner2[kTetEdge[m][0]];
                        const int* eb = corner2[kTetEdge[m][1]];
                        e.nodes[4 + m] = nb.get((ea[0] + eb[0]) / 2, (ea[1] + eb[1]) / 2,
                                                (ea[2] + eb[2]) / 2);
                    }
                    mesh.elements.push_back(e);
                }
            }
    if (mesh.elements.empty()) fail_data("EmptyMask", "mask has no set voxels");
    return mesh;
}

double Mesh::element_volume(int e) const {
    const Element& el = elements[e];
    if (el.kind == ElemKind::Tet10) {
        const auto& a = nodes[el.nodes[0]];
        const auto& b = nodes[el.nodes[1]];
        const auto& c = nodes[el.nodes[2]];
        const auto& d = nodes[el.nodes[3]];
        const double m[3][3] = {{b[0] - a[0], c[0] - a[0], d[0] - a[0]},
                                {b[1] - a[1], c[1] - a[1], d[1] - a[1]},
                                {b[2] - a[2], c[2] - a[2], d[2] - a[2]}};
        const double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
        return det / 6.0;
    }
    // Voxel hexes are axis-aligned bricks.
    const auto& n0 = nodes[el.nodes[0]];
    const auto& n6 = nodes[el.nodes[6]];
    return (n6[0] - n0[0]) * (n6[1] - n0[1]) * (n6[2] - n0[2]);
}

std::array<double, 3> Mesh::element_centroid(int e) const {
    const Element& el = elements[e];
    const int nc = el.kind == ElemKind::Hex8 ? 8 : 4; // corners only
    std::array<double, 3> c{0.0, 0.0, 0.0};
    for (int i = 0; i < nc; ++i)
        for (int a = 0; a < 3; ++a) c[a] += nodes[el.nodes[i]][a];
    for (int a = 0; a < 3; ++a) c[a] /= nc;
    return c;
}

void Mesh::bone_bounds(std::array<double, 3>& lo, std::array<double, 3>& hi) const {
    lo = {1e300, 1e300, 1e300};
    hi = {-1e300, -1e300, -1e300};
    bool any = false;
    for (const auto& el : elements) {
        if (el.tag != ElemTag::Bone) continue;
        any = true;
        const int nn = nodes_per_elem(el.kind);
        for (int i = 0; i < nn; ++i)
            for (int a = 0; a < 3; ++a) {
                lo[a] = std::min(lo[a], nodes[el.nodes[i]][a]);
                hi[a] = std::max(hi[a], nodes[el.nodes[i]][a]);
            }
    }
    if (!any) fail_data("EmptyMask", "mesh has no bone elements");
}

double Mesh::bone_axial_height(const Orientation& orient) const {
    std::array<double, 3> lo, hi;
    bone_bounds(lo, hi);
    return hi[orient.axial_i()] - lo[orient.axial_i()];
}

// ---------------------------------------------------------------------------
// Boundary faces and endplates
// ---------------------------------------------------------------------------

namespace {

constexpr int kHexFace[6][4] = {{0, 1, 2, 3}, {4, 5, 6, 7}, {0, 1, 5, 4},
                                {3, 2, 6, 7}, {0, 3, 7, 4}, {1, 2, 6, 5}};
// Tet faces as (3 corners, 3 midsides).
constexpr int kTetFace[4][6] = {{0, 1, 2, 4, 5, 6},
                                {0, 1, 3, 4, 8, 7},
                                {1, 2, 3, 5, 9, 8},
                                {0, 2, 3, 6, 9, 7}};

struct FaceKey {
    std::array<int, 4> c; // sorted corner ids, c[3] = -1 for triangles
    bool operator==(const FaceKey& o) const { return c == o.c; }
};
struct FaceKeyHash {
    std::size_t operator()(const FaceKey& k) const {
        std::size_t h = 1469598103934665603ull;
        for (int v : k.c) {
            h ^= static_cast<std::size_t>(v) + 0x9e3779b97f4a7c15ull;
            h *= 1099511628211ull;
        }
        return h;
    }
};

FaceKey make_face_key(const Element& el, int f) {
    FaceKey key;
    if (el.kind == ElemKind::Hex8) {
        for (int i = 0; i < 4; ++i) key.c[i] = el.nodes[kHexFace[f][i]];
        std::sort(key.c.begin(), key.c.end());
    } else {
        for (int i = 0; i < 3; ++i) key.c[i] = el.nodes[kTetFace[f][i]];
        std::sort(key.c.begin(), key.c.begin() + 3);
        key.c[3] = -1;
    }
    return key;
}

int faces_per_elem(ElemKind k) { return k == ElemKind::Hex8 ? 6 : 4; }

} // namespace

EndplateSets detect_endplates(const Mesh& mesh, const Orientation& orient,
                              double band_fraction) {
    orient.validate();
    if (!(band_fraction > 0.0) || band_fraction > 0.2)
        fail_data("EmptyEndplate", "band_fraction must be in (0, 0.2]");

    // Count each face; faces owned by exactly one element are on the surface.
    std::unordered_map<FaceKey, int, FaceKeyHash> count;
    for (const auto& el : mesh.elements)
        for (int f = 0; f < faces_per_elem(el.kind); ++f) count[make_face_key(el, f)]++;

    std::vector<std::uint8_t> on_surface(mesh.nodes.size(), 0);
    for (const auto& el : mesh.elements)
        for (int f = 0; f < faces_per_elem(el.kind); ++f) {
            if (count[make_face_key(el, f)] != 1) continue;
            if (el.kind == ElemKind::Hex8) {
                for (int i = 0; i < 4; ++i) on_surface[el.nodes[kHexFace[f][i]]] = 1;
            } else {
                for (int i = 0; i < 6; ++i) on_surface[el.nodes[kTetFace[f][i]]] = 1;
            }
        }

    const int ax = orient.axial_i();
    double lo = 1e300, hi = -1e300;
    for (const auto& p : mesh.nodes) {
        lo = std::min(lo, p[ax]);
        hi = std::max(hi, p[ax]);
    }
    const double band = band_fraction * (hi - lo);

    EndplateSets sets;
    for (int n = 0; n < mesh.n_nodes(); ++n) {
        if (!on_surface[n]) continue;
        if (mesh.nodes[n][ax] <= lo + band) sets.inferior.push_back(n);
        if (mesh.nodes[n][ax] >= hi - band) sets.superior.push_back(n);
    }
    if (sets.inferior.empty() || sets.superior.empty())
        fail_data("EmptyEndplate", "endplate detection found no nodes");
    return sets;
}

// ---------------------------------------------------------------------------
// PMMA extrusion
// ---------------------------------------------------------------------------

Mesh extrude_pmma(const Mesh& mesh, const Orientation& orient, double thickness_mm) {
    orient.validate();
    if (!(thickness_mm > 0.0))
        fail_data("BadThickness", "PMMA thickness must be > 0");
    if (!mesh.has_grid)
        fail_data("NotHexMesh", "PMMA extrusion needs a voxel-derived hex mesh");
    for (const auto& el : mesh.elements)
        if (el.kind != ElemKind::Hex8)
            fail_data("NotHexMesh", "PMMA extrusion requires a hex mesh");

    const int ax = orient.axial_i();
    const int t1 = (ax + 1) % 3, t2 = (ax + 2) % 3;
    const int layers =
        static_cast<int>(std::ceil(thickness_mm / mesh.grid_spacing[ax] - 1e-12));

    Mesh out = mesh;
    NodeBuilder nb(out.grid_origin, out.grid_spacing, out.nodes);
    // Bind the existing lattice corners so cap nodes are shared with the
    // bone mesh.
    for (const auto& el : mesh.elements) {
        if (el.source_voxel < 0)
            fail_data("NotHexMesh", "PMMA extrusion needs voxel provenance on every element");
        const long long src = el.source_voxel;
        const int vi = static_cast<int>(src % out.grid_dims[0]);
        const int vj = static_cast<int>((src / out.grid_dims[0]) % out.grid_dims[1]);
        const int vk = static_cast<int>(src / (static_cast<long long>(out.grid_dims[0]) *
                                               out.grid_dims[1]));
        for (int c = 0; c < 8; ++c)
            nb.register_existing(2 * (vi + kHexCorner[c][0]), 2 * (vj + kHexCorner[c][1]),
                                 2 * (vk + kHexCorner[c][2]), el.nodes[c]);
    }

    // Per transverse column: topmost / lowest set voxel axial index.
    std::map<std::pair<int, int>, std::pair<int, int>> col; // (t1,t2) -> (min,max)
    for (const auto& el : mesh.elements) {
        const long long src = el.source_voxel;
        int v[3];
        v[0] = static_cast<int>(src % out.grid_dims[0]);
        v[1] = static_cast<int>((src / out.grid_dims[0]) % out.grid_dims[1]);
        v[2] = static_cast<int>(src / (static_cast<long long>(out.grid_dims[0]) *
                                       out.grid_dims[1]));
        const auto key = std::make_pair(v[t1], v[t2]);
        auto it = col.find(key);
        if (it == col.end())
            col[key] = {v[ax], v[ax]};
        else {
            it->second.first = std::min(it->second.first, v[ax]);
            it->second.second = std::max(it->second.second, v[ax]);
        }
    }

    auto add_cap_cell = [&](int c_t1, int c_t2, int c_ax) {
        int v2[3];
        v2[t1] = 2 * c_t1;
        v2[t2] = 2 * c_t2;
        v2[ax] = 2 * c_ax;
        Element e;
        e.kind = ElemKind::Hex8;
        e.tag = ElemTag::Pmma;
        e.source_voxel = -1;
        for (int c = 0; c < 8; ++c)
            e.nodes[c] = nb.get(v2[0] + 2 * kHexCorner[c][0], v2[1] + 2 * kHexCorner[c][1],
                                v2[2] + 2 * kHexCorner[c][2]);
        out.elements.push_back(e);
    };
    auto add_face_nodes = [&](std::vector<int>& set, int c_t1, int c_t2, int level_ax) {
        for (int b = 0; b < 2; ++b)
            for (int a = 0; a < 2; ++a) {
                int v2[3];
                v2[t1] = 2 * (c_t1 + a);
                v2[t2] = 2 * (c_t2 + b);
                v2[ax] = 2 * level_ax;
                set.push_back(nb.get(v2[0], v2[1], v2[2]));
            }
    };

    std::vector<int> pmma_top, pmma_bottom;
    for (const auto& [key, range] : col) {
        for (int l = 1; l <= layers; ++l) {
            add_cap_cell(key.first, key.second, range.second + l);
            add_cap_cell(key.first, key.second, range.first - l);
        }
        add_face_nodes(pmma_top, key.first, key.second, range.second + 1 + layers);
        add_face_nodes(pmma_bottom, key.first, key.second, range.first - layers);
    }
    auto uniq = [](std::vector<int>& v) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    };
    uniq(pmma_top);
    uniq(pmma_bottom);
    out.node_sets["pmma_top"] = std::move(pmma_top);
    out.node_sets["pmma_bottom"] = std::move(pmma_bottom);
    return out;
}

std::array<double, 3> anterior_third_point(const Mesh& mesh, const Orientation& orient) {
    orient.validate();
    std::array<double, 3> lo, hi;
    mesh.bone_bounds(lo, hi);

    const int ax = orient.axial_i();
    const int ap = orient.anterior_i();
    const int lat = orient.lateral_i();

    // Volume-weighted bone centroid along the left-right axis.
    double vol = 0.0, cw = 0.0;
    for (int e = 0; e < mesh.n_elements(); ++e) {
        if (mesh.elements[e].tag != ElemTag::Bone) continue;
        const double v = mesh.element_volume(e);
        cw += v * mesh.element_centroid(e)[lat];
        vol += v;
    }

    std::array<double, 3> p{};
    double axial_top = -1e300;
    for (const auto& n : mesh.nodes) axial_top = std::max(axial_top, n[ax]);
    p[ax] = axial_top;
    p[lat] = cw / vol;
    const double extent = hi[ap] - lo[ap];
    p[ap] = orient.anterior_sign > 0 ? hi[ap] - extent / 3.0 : lo[ap] + extent / 3.0;
    return p;
}

// ---------------------------------------------------------------------------
// ASCII export
// ---------------------------------------------------------------------------

void save_mesh_ascii(const Mesh& mesh, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) fail_data("OutputNotWritable", "cannot open " + path + " for writing");
    std::fprintf(f, "vertfe-mesh 1\n");
    std::fprintf(f, "counts %d %d %d\n", mesh.n_nodes(), mesh.n_elements(),
                 static_cast<int>(mesh.node_sets.size()));
    for (int n = 0; n < mesh.n_nodes(); ++n)
        std::fprintf(f, "%d %.17g %.17g %.17g\n", n, mesh.nodes[n][0], mesh.nodes[n][1],
                     mesh.nodes[n][2]);
    for (int e = 0; e < mesh.n_elements(); ++e) {
        const Element& el = mesh.elements[e];
        std::fprintf(f, "%d %s %s", e, el.kind == ElemKind::Hex8 ? "hex8" : "tet10",
                     el.tag == ElemTag::Bone ? "bone" : "pmma");
        for (int i = 0; i < nodes_per_elem(el.kind); ++i)
            std::fprintf(f, " %d", el.nodes[i]);
        std::fprintf(f, "\n");
    }
    for (const auto& [name, ids] : mesh.node_sets) {
        std::fprintf(f, "set %s %d\n", name.c_str(), static_cast<int>(ids.size()));
        for (std::size_t i = 0; i < ids.size(); ++i)
            std::fprintf(f, "%s%d", i ? " " : "", ids[i]);
        std::fprintf(f, "\n");
    }
    std::fclose(f);
}

} // namespace vertfe
