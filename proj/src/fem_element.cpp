#include <cmath>
#include <cstring>

#include "fem_internal.hpp"

namespace vertfe {

namespace detail {

int gauss_rule(ElemKind kind, double pts[kMaxGp][3], double wts[kMaxGp]) {
    if (kind == ElemKind::Hex8) {
        const double a = 1.0 / std::sqrt(3.0);
        int g = 0;
        for (int k = 0; k < 2; ++k)
            for (int j = 0; j < 2; ++j)
                for (int i = 0; i < 2; ++i) {
                    pts[g][0] = i ? a : -a;
                    pts[g][1] = j ? a : -a;
                    pts[g][2] = k ? a : -a;
                    wts[g] = 1.0;
                    ++g;
                }
        return 8;
    }
    // Degree-2 4-point rule; barycentric (a,b,b,b) permutations.
    const double a = 0.58541019662496845446;
    const double b = 0.13819660112501051518;
    const double w = 1.0 / 24.0;
    // reference coords are (L1, L2, L3)
    const double gp[4][4] = {{a, b, b, b}, {b, a, b, b}, {b, b, a, b}, {b, b, b, a}};
    for (int g = 0; g < 4; ++g) {
        pts[g][0] = gp[g][1];
        pts[g][1] = gp[g][2];
        pts[g][2] = gp[g][3];
        wts[g] = w;
    }
    return 4;
}

void centroid_xi(ElemKind kind, double xi[3]) {
    if (kind == ElemKind::Hex8) {
        xi[0] = xi[1] = xi[2] = 0.0;
    } else {
        xi[0] = xi[1] = xi[2] = 0.25;
    }
}

void shape_deriv_ref(ElemKind kind, const double xi[3], double* dN) {
    if (kind == ElemKind::Hex8) {
        // corner signs matching the (0,0,0)..(0,1,1) lattice ordering
        static const int sg[8][3] = {{-1, -1, -1}, {1, -1, -1}, {1, 1, -1}, {-1, 1, -1},
                                     {-1, -1, 1},  {1, -1, 1},  {1, 1, 1},  {-1, 1, 1}};
        for (int n = 0; n < 8; ++n) {
            const double fx = 1.0 + sg[n][0] * xi[0];
            const double fy = 1.0 + sg[n][1] * xi[1];
            const double fz = 1.0 + sg[n][2] * xi[2];
            dN[n * 3 + 0] = 0.125 * sg[n][0] * fy * fz;
            dN[n * 3 + 1] = 0.125 * fx * sg[n][1] * fz;
            dN[n * 3 + 2] = 0.125 * fx * fy * sg[n][2];
        }
        return;
    }
    // Tet10: L = (1-x-y-z, x, y, z); dL[i][k] = dL_i/dxi_k.
    static const double dL[4][3] = {{-1, -1, -1}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    static const int edge[6][2] = {{0, 1}, {1, 2}, {0, 2}, {0, 3}, {1, 3}, {2, 3}};
    const double L[4] = {1.0 - xi[0] - xi[1] - xi[2], xi[0], xi[1], xi[2]};
    for (int c = 0; c < 4; ++c)
        for (int k = 0; k < 3; ++k)
            dN[c * 3 + k] = (4.0 * L[c] - 1.0) * dL[c][k];
    for (int m = 0; m < 6; ++m) {
        const int i = edge[m][0], j = edge[m][1];
        for (int k = 0; k < 3; ++k)
            dN[(4 + m) * 3 + k] = 4.0 * (L[i] * dL[j][k] + L[j] * dL[i][k]);
    }
}

double shape_grad(ElemKind kind, const double* coords, const double xi[3],
                  double* dNdx) {
    const int n = nodes_per_elem(kind);
    double dN[kMaxElemNodes * 3];
    shape_deriv_ref(kind, xi, dN);

    // J[a][k] = dx_a / dxi_k
    double J[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
    for (int i = 0; i < n; ++i)
        for (int a = 0; a < 3; ++a)
            for (int k = 0; k < 3; ++k) J[a][k] += coords[i * 3 + a] * dN[i * 3 + k];

    const double det = J[0][0] * (J[1][1] * J[2][2] - J[1][2] * J[2][1]) -
                       J[0][1] * (J[1][0] * J[2][2] - J[1][2] * J[2][0]) +
                       J[0][2] * (J[1][0] * J[2][1] - J[1][1] * J[2][0]);
    if (!(det > 0.0))
        fail_numerical("InvertedElement", "non-positive Jacobian determinant");

    const double inv = 1.0 / det;
    double Ji[3][3]; // Ji[k][a] = dxi_k / dx_a
    Ji[0][0] = inv * (J[1][1] * J[2][2] - J[1][2] * J[2][1]);
    Ji[0][1] = inv * (J[0][2] * J[2][1] - J[0][1] * J[2][2]);
    Ji[0][2] = inv * (J[0][1] * J[1][2] - J[0][2] * J[1][1]);
    Ji[1][0] = inv * (J[1][2] * J[2][0] - J[1][0] * J[2][2]);
    Ji[1][1] = inv * (J[0][0] * J[2][2] - J[0][2] * J[2][0]);
    Ji[1][2] = inv * (J[0][2] * J[1][0] - J[0][0] * J[1][2]);
    Ji[2][0] = inv * (J[1][0] * J[2][1] - J[1][1] * J[2][0]);
    Ji[2][1] = inv * (J[0][1] * J[2][0] - J[0][0] * J[2][1]);
    Ji[2][2] = inv * (J[0][0] * J[1][1] - J[0][1] * J[1][0]);

    for (int i = 0; i < n; ++i)
        for (int a = 0; a < 3; ++a)
            dNdx[i * 3 + a] = dN[i * 3 + 0] * Ji[0][a] + dN[i * 3 + 1] * Ji[1][a] +
                              dN[i * 3 + 2] * Ji[2][a];
    return det;
}

void elem_coords(const Mesh& mesh, int e, double* coords) {
    const Element& el = mesh.elements[e];
    const int n = nodes_per_elem(el.kind);
    for (int i = 0; i < n; ++i)
        for (int a = 0; a < 3; ++a) coords[i * 3 + a] = mesh.nodes[el.nodes[i]][a];
}

void elem_disp(const Mesh& mesh, int e, const std::vector<double>& u, double* ue) {
    const Element& el = mesh.elements[e];
    const int n = nodes_per_elem(el.kind);
    for (int i = 0; i < n; ++i)
        for (int a = 0; a < 3; ++a) ue[i * 3 + a] = u[3 * el.nodes[i] + a];
}

void strain_from_grad(int n_nodes, const double* dNdx, const double* ue,
                      double eps[6]) {
    for (int c = 0; c < 6; ++c) eps[c] = 0.0;
    for (int i = 0; i < n_nodes; ++i) {
        const double gx = dNdx[i * 3 + 0], gy = dNdx[i * 3 + 1], gz = dNdx[i * 3 + 2];
        const double ux = ue[i * 3 + 0], uy = ue[i * 3 + 1], uz = ue[i * 3 + 2];
        eps[0] += gx * ux;
        eps[1] += gy * uy;
        eps[2] += gz * uz;
        eps[3] += gy * ux + gx * uy; // gamma_xy
        eps[4] += gz * uy + gy * uz; // gamma_yz
        eps[5] += gz * ux + gx * uz; // gamma_xz
    }
}

void isotropic_stress(double E, double nu, const double eps[6], double sigma[6]) {
    const double lam = E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
    const double mu = E / (2.0 * (1.0 + nu));
    const double tr = eps[0] + eps[1] + eps[2];
    sigma[0] = lam * tr + 2.0 * mu * eps[0];
    sigma[1] = lam * tr + 2.0 * mu * eps[1];
    sigma[2] = lam * tr + 2.0 * mu * eps[2];
    sigma[3] = mu * eps[3];
    sigma[4] = mu * eps[4];
    sigma[5] = mu * eps[5];
}

void radial_return(double E, double nu, double sigma_y, const double eps[6],
                   const double eps_p[6], double sigma[6], double eps_p_new[6]) {
    double eps_e[6];
    for (int c = 0; c < 6; ++c) eps_e[c] = eps[c] - eps_p[c];
    isotropic_stress(E, nu, eps_e, sigma);

    const double p = (sigma[0] + sigma[1] + sigma[2]) / 3.0;
    const double s[6] = {sigma[0] - p, sigma[1] - p, sigma[2] - p,
                         sigma[3],     sigma[4],     sigma[5]};
    const double j2x2 = s[0] * s[0] + s[1] * s[1] + s[2] * s[2] +
                        2.0 * (s[3] * s[3] + s[4] * s[4] + s[5] * s[5]);
    const double q = std::sqrt(1.5 * j2x2);

    if (q <= sigma_y) {
        for (int c = 0; c < 6; ++c) eps_p_new[c] = eps_p[c];
        return;
    }
    const double mu = E / (2.0 * (1.0 + nu));
    const double dgamma = (q - sigma_y) / (3.0 * mu);
    const double scale = sigma_y / q;
    for (int c = 0; c < 3; ++c) sigma[c] = p + s[c] * scale;
    for (int c = 3; c < 6; ++c) sigma[c] = s[c] * scale;
    // flow direction n = 1.5 s / q; plastic strain uses engineering shear
    const double f = 1.5 * dgamma / q;
    for (int c = 0; c < 3; ++c) eps_p_new[c] = eps_p[c] + f * s[c];
    for (int c = 3; c < 6; ++c) eps_p_new[c] = eps_p[c] + 2.0 * f * s[c];
}

void accumulate_internal_force(int n_nodes, const double* dNdx, const double sigma[6],
                               double w_detj, double* fe) {
    for (int i = 0; i < n_nodes; ++i) {
        const double gx = dNdx[i * 3 + 0], gy = dNdx[i * 3 + 1], gz = dNdx[i * 3 + 2];
        fe[i * 3 + 0] += w_detj * (gx * sigma[0] + gy * sigma[3] + gz * sigma[5]);
        fe[i * 3 + 1] += w_detj * (gy * sigma[1] + gx * sigma[3] + gz * sigma[4]);
        fe[i * 3 + 2] += w_detj * (gz * sigma[2] + gy * sigma[4] + gx * sigma[5]);
    }
}

std::vector<int> gp_offsets(const Mesh& mesh) {
    std::vector<int> off(mesh.n_elements() + 1, 0);
    for (int e = 0; e < mesh.n_elements(); ++e)
        off[e + 1] = off[e] + gauss_points_per_elem(mesh.elements[e].kind);
    return off;
}

} // namespace detail

// ===========================================================================
// Public element API
// ===========================================================================

void element_stiffness(ElemKind kind, const double* coords, double E, double nu,
                       double* K) {
    using namespace detail;
    const int n = nodes_per_elem(kind);
    const int nd = 3 * n;
    std::memset(K, 0, sizeof(double) * nd * nd);

    const double lam = E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
    const double mu = E / (2.0 * (1.0 + nu));

    double pts[kMaxGp][3], wts[kMaxGp];
    const int ngp = gauss_rule(kind, pts, wts);
    double dNdx[kMaxElemNodes * 3];

    for (int g = 0; g < ngp; ++g) {
        const double detj = shape_grad(kind, coords, pts[g], dNdx);
        const double w = wts[g] * detj;
        // K_ab = w * (lam ga gb^T + mu gb ga^T + mu (ga.gb) I)
        for (int a = 0; a < n; ++a) {
            const double* ga = dNdx + a * 3;
            for (int b = 0; b < n; ++b) {
                const double* gb = dNdx + b * 3;
                const double gdot = ga[0] * gb[0] + ga[1] * gb[1] + ga[2] * gb[2];
                for (int i = 0; i < 3; ++i)
                    for (int j = 0; j < 3; ++j) {
                        double v = lam * ga[i] * gb[j] + mu * gb[i] * ga[j];
                        if (i == j) v += mu * gdot;
                        K[(3 * a + i) * nd + (3 * b + j)] += w * v;
                    }
            }
        }
    }
}

std::array<double, 6> element_centroid_strain(const Mesh& mesh, int e,
                                              const std::vector<double>& u) {
    using namespace detail;
    const Element& el = mesh.elements[e];
    double coords[kMaxElemNodes * 3], ue[kMaxElemDof], dNdx[kMaxElemNodes * 3];
    elem_coords(mesh, e, coords);
    elem_disp(mesh, e, u, ue);
    double xi[3];
    centroid_xi(el.kind, xi);
    shape_grad(el.kind, coords, xi, dNdx);
    std::array<double, 6> eps{};
    strain_from_grad(nodes_per_elem(el.kind), dNdx, ue, eps.data());
    return eps;
}

void element_gp_strains(const Mesh& mesh, int e, const std::vector<double>& u,
                        double* out) {
    using namespace detail;
    const Element& el = mesh.elements[e];
    const int n = nodes_per_elem(el.kind);
    double coords[kMaxElemNodes * 3], ue[kMaxElemDof], dNdx[kMaxElemNodes * 3];
    elem_coords(mesh, e, coords);
    elem_disp(mesh, e, u, ue);
    double pts[kMaxGp][3], wts[kMaxGp];
    const int ngp = gauss_rule(el.kind, pts, wts);
    for (int g = 0; g < ngp; ++g) {
        shape_grad(el.kind, coords, pts[g], dNdx);
        strain_from_grad(n, dNdx, ue, out + 6 * g);
    }
}

double equivalent_strain(const std::array<double, 6>& eps, StrainMeasure measure) {
    if (measure == StrainMeasure::VonMises) {
        const double tr3 = (eps[0] + eps[1] + eps[2]) / 3.0;
        const double ex = eps[0] - tr3, ey = eps[1] - tr3, ez = eps[2] - tr3;
        // tensor shear = gamma/2; e:e adds 2 * sum(shear^2)
        const double ee = ex * ex + ey * ey + ez * ez +
                          0.5 * (eps[3] * eps[3] + eps[4] * eps[4] + eps[5] * eps[5]);
        return std::sqrt(2.0 / 3.0 * ee);
    }
    // Smallest principal strain magnitude (trigonometric eigenvalues).
    const double a = eps[0], b = eps[1], c = eps[2];
    const double d = eps[3] / 2.0, e = eps[4] / 2.0, f = eps[5] / 2.0;
    const double q = (a + b + c) / 3.0;
    const double aa = a - q, bb = b - q, cc = c - q;
    const double p2 = aa * aa + bb * bb + cc * cc + 2.0 * (d * d + e * e + f * f);
    if (p2 <= 0.0) return std::abs(q);
    const double p = std::sqrt(p2 / 6.0);
    // det of (A - qI)/p
    const double m00 = aa / p, m11 = bb / p, m22 = cc / p;
    const double m01 = d / p, m12 = e / p, m02 = f / p;
    double r = 0.5 * (m00 * (m11 * m22 - m12 * m12) - m01 * (m01 * m22 - m12 * m02) +
                      m02 * (m01 * m12 - m11 * m02));
    r = std::max(-1.0, std::min(1.0, r));
    const double phi = std::acos(r) / 3.0;
    const double lmin = q + 2.0 * p * std::cos(phi + 2.0 * M_PI / 3.0);
    return std::abs(lmin);
}

} // namespace vertfe
