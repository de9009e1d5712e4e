#pragma once

// Element-level building blocks shared by the fem_* translation units.

#include <array>

#include "vertfe/fem.hpp"

namespace vertfe::detail {

constexpr int kMaxElemNodes = 10;
constexpr int kMaxElemDof = 30;
constexpr int kMaxGp = 8;

/// Gauss rule in reference coordinates; returns the point count.
int gauss_rule(ElemKind kind, double pts[kMaxGp][3], double wts[kMaxGp]);

void centroid_xi(ElemKind kind, double xi[3]);

/// Shape-function gradients w.r.t. reference coordinates. dN is n x 3.
void shape_deriv_ref(ElemKind kind, const double xi[3], double* dN);

/// Global gradients at xi; returns det(J). coords is n x 3 row-major.
double shape_grad(ElemKind kind, const double* coords, const double xi[3],
                  double* dNdx);

/// Gather the element's node coordinates (n x 3).
void elem_coords(const Mesh& mesh, int e, double* coords);

/// Gather element displacements (3n) from the global vector.
void elem_disp(const Mesh& mesh, int e, const std::vector<double>& u, double* ue);

/// Voigt strain (xx,yy,zz,xy,yz,xz; engineering shear) from global
/// gradients and element displacements.
void strain_from_grad(int n_nodes, const double* dNdx, const double* ue,
                      double eps[6]);

/// sigma = C(E, nu) * eps, Voigt.
void isotropic_stress(double E, double nu, const double eps[6], double sigma[6]);

/// Von Mises radial return for perfect plasticity. eps is the total strain,
/// eps_p the committed plastic strain (both Voigt, engineering shear).
/// Writes the returned stress and the updated plastic strain.
void radial_return(double E, double nu, double sigma_y, const double eps[6],
                   const double eps_p[6], double sigma[6], double eps_p_new[6]);

/// f_e += B^T sigma * w * detJ for one integration point.
void accumulate_internal_force(int n_nodes, const double* dNdx, const double sigma[6],
                               double w_detj, double* fe);

/// Integration-point offsets: gp_offset[e] is the first point of element e.
std::vector<int> gp_offsets(const Mesh& mesh);

} // namespace vertfe::detail
