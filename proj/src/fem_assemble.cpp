#include <algorithm>
#include <cstring>
#include <numeric>

#include "fem_internal.hpp"
#include "vertfe/runtime.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace vertfe {

using namespace detail;

namespace {

constexpr int kChunk = 2048; // elements per parallel integration block

CsrMatrix stiffness_pattern(const Mesh& mesh) {
    const int n_nodes = mesh.n_nodes();
    std::vector<std::vector<int>> adj(n_nodes);
    for (const auto& el : mesh.elements) {
        const int nn = nodes_per_elem(el.kind);
        for (int a = 0; a < nn; ++a)
            for (int b = 0; b < nn; ++b) adj[el.nodes[a]].push_back(el.nodes[b]);
    }
    CsrMatrix K;
    K.n = 3 * n_nodes;
    K.row_ptr.assign(K.n + 1, 0);
    for (int i = 0; i < n_nodes; ++i) {
        auto& a = adj[i];
        std::sort(a.begin(), a.end());
        a.erase(std::unique(a.begin(), a.end()), a.end());
        for (int c = 0; c < 3; ++c)
            K.row_ptr[3 * i + c + 1] = static_cast<int>(3 * a.size());
    }
    for (int r = 0; r < K.n; ++r) K.row_ptr[r + 1] += K.row_ptr[r];
    K.col.resize(K.row_ptr[K.n]);
    K.val.assign(K.row_ptr[K.n], 0.0);
    for (int i = 0; i < n_nodes; ++i)
        for (int c = 0; c < 3; ++c) {
            int p = K.row_ptr[3 * i + c];
            for (int j : adj[i])
                for (int d = 0; d < 3; ++d) K.col[p++] = 3 * j + d;
        }
    return K;
}

void check_materials(const Mesh& mesh, const MaterialMap& mat) {
    if (static_cast<int>(mat.youngs.size()) != mesh.n_elements() ||
        static_cast<int>(mat.poisson.size()) != mesh.n_elements())
        fail_data("MissingMaterial", "material map does not cover all elements");
}

// Scatter one element matrix; accumulation happens in element order.
void scatter(CsrMatrix& K, const Mesh& mesh, int e, const double* Ke) {
    const Element& el = mesh.elements[e];
    const int nn = nodes_per_elem(el.kind);
    const int nd = 3 * nn;
    for (int a = 0; a < nn; ++a)
        for (int i = 0; i < 3; ++i) {
            const int row = 3 * el.nodes[a] + i;
            const int lo = K.row_ptr[row], hi = K.row_ptr[row + 1];
            for (int b = 0; b < nn; ++b)
                for (int j = 0; j < 3; ++j) {
                    const int c = 3 * el.nodes[b] + j;
                    auto it = std::lower_bound(K.col.begin() + lo, K.col.begin() + hi, c);
                    K.val[static_cast<std::size_t>(it - K.col.begin())] +=
                        Ke[(3 * a + i) * nd + (3 * b + j)];
                }
        }
}

} // namespace

CsrMatrix assemble_serial(const Mesh& mesh, const MaterialMap& materials) {
    check_materials(mesh, materials);
    CsrMatrix K = stiffness_pattern(mesh);
    double coords[kMaxElemNodes * 3];
    std::vector<double> Ke(kMaxElemDof * kMaxElemDof);
    for (int e = 0; e < mesh.n_elements(); ++e) {
        elem_coords(mesh, e, coords);
        element_stiffness(mesh.elements[e].kind, coords, materials.youngs[e],
                          materials.poisson[e], Ke.data());
        scatter(K, mesh, e, Ke.data());
    }
    return K;
}

CsrMatrix assemble(const Mesh& mesh, const MaterialMap& materials) {
    check_materials(mesh, materials);
    const int nt = threads();
    if (nt <= 1) return assemble_serial(mesh, materials);

    CsrMatrix K = stiffness_pattern(mesh);
    const int ne = mesh.n_elements();
    std::vector<double> block(static_cast<std::size_t>(kChunk) * kMaxElemDof *
                              kMaxElemDof);
    for (int e0 = 0; e0 < ne; e0 += kChunk) {
        const int e1 = std::min(e0 + kChunk, ne);
        // integrate in parallel, scatter serially in element order
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(nt)
#endif
        for (int e = e0; e < e1; ++e) {
            double coords[kMaxElemNodes * 3];
            elem_coords(mesh, e, coords);
            element_stiffness(mesh.elements[e].kind, coords, materials.youngs[e],
                              materials.poisson[e],
                              block.data() +
                                  static_cast<std::size_t>(e - e0) * kMaxElemDof *
                                      kMaxElemDof);
        }
        for (int e = e0; e < e1; ++e)
            scatter(K, mesh, e,
                    block.data() +
                        static_cast<std::size_t>(e - e0) * kMaxElemDof * kMaxElemDof);
    }
    return K;
}

CsrMatrix reduce_stiffness(const CsrMatrix& K, const ConstraintMap& map) {
    const int nr = map.n_reduced();
    std::vector<std::vector<int>> cols(nr);
    for (int i = 0; i < K.n; ++i) {
        const DofRow& ri = map.row(i);
        if (ri.n_terms == 0) continue;
        for (int p = K.row_ptr[i]; p < K.row_ptr[i + 1]; ++p) {
            const DofRow& rj = map.row(K.col[p]);
            for (int a = 0; a < ri.n_terms; ++a)
                for (int b = 0; b < rj.n_terms; ++b)
                    cols[ri.terms[a].q].push_back(rj.terms[b].q);
        }
    }
    CsrMatrix R;
    R.n = nr;
    R.row_ptr.assign(nr + 1, 0);
    for (int r = 0; r < nr; ++r) {
        auto& c = cols[r];
        std::sort(c.begin(), c.end());
        c.erase(std::unique(c.begin(), c.end()), c.end());
        R.row_ptr[r + 1] = R.row_ptr[r] + static_cast<int>(c.size());
    }
    R.col.resize(R.row_ptr[nr]);
    R.val.assign(R.row_ptr[nr], 0.0);
    for (int r = 0; r < nr; ++r)
        std::copy(cols[r].begin(), cols[r].end(), R.col.begin() + R.row_ptr[r]);

    for (int i = 0; i < K.n; ++i) {
        const DofRow& ri = map.row(i);
        if (ri.n_terms == 0) continue;
        for (int p = K.row_ptr[i]; p < K.row_ptr[i + 1]; ++p) {
            const DofRow& rj = map.row(K.col[p]);
            const double v = K.val[p];
            for (int a = 0; a < ri.n_terms; ++a)
                for (int b = 0; b < rj.n_terms; ++b)
                    R.ref(ri.terms[a].q, rj.terms[b].q) +=
                        ri.terms[a].c * rj.terms[b].c * v;
        }
    }
    return R;
}

std::vector<double> internal_forces(const Mesh& mesh,
                                    const std::vector<double>& gp_stress) {
    const std::vector<int> off = gp_offsets(mesh);
    std::vector<double> f(3 * mesh.n_nodes(), 0.0);
    const int ne = mesh.n_elements();
    const int nt = threads();

    std::vector<double> block(static_cast<std::size_t>(kChunk) * kMaxElemDof);
    for (int e0 = 0; e0 < ne; e0 += kChunk) {
        const int e1 = std::min(e0 + kChunk, ne);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(nt) if (nt > 1)
#endif
        for (int e = e0; e < e1; ++e) {
            const Element& el = mesh.elements[e];
            const int nn = nodes_per_elem(el.kind);
            double coords[kMaxElemNodes * 3], dNdx[kMaxElemNodes * 3];
            double pts[kMaxGp][3], wts[kMaxGp];
            elem_coords(mesh, e, coords);
            const int ngp = gauss_rule(el.kind, pts, wts);
            double* fe = block.data() + static_cast<std::size_t>(e - e0) * kMaxElemDof;
            std::memset(fe, 0, sizeof(double) * kMaxElemDof);
            for (int g = 0; g < ngp; ++g) {
                const double detj = shape_grad(el.kind, coords, pts[g], dNdx);
                accumulate_internal_force(nn, dNdx,
                                          gp_stress.data() + 6 * (off[e] + g),
                                          wts[g] * detj, fe);
            }
        }
        for (int e = e0; e < e1; ++e) {
            const Element& el = mesh.elements[e];
            const int nn = nodes_per_elem(el.kind);
            const double* fe = block.data() + static_cast<std::size_t>(e - e0) * kMaxElemDof;
            for (int a = 0; a < nn; ++a)
                for (int i = 0; i < 3; ++i) f[3 * el.nodes[a] + i] += fe[3 * a + i];
        }
    }
    return f;
}

} // namespace vertfe
