#pragma once

#include <array>
#include <optional>
#include <vector>

#include "vertfe/material.hpp"
#include "vertfe/mesh.hpp"
#include "vertfe/sparse.hpp"

namespace vertfe {

// ===========================================================================
// Element level
// ===========================================================================

/// Integration points per element: Hex8 2x2x2 Gauss, Tet10 degree-2 4-point.
inline int gauss_points_per_elem(ElemKind k) { return k == ElemKind::Hex8 ? 8 : 4; }

/// Dense symmetric element stiffness (row-major, ndof = 3*nodes).
/// Throws Error("InvertedElement") on a non-positive Jacobian.
void element_stiffness(ElemKind kind, const double* coords, double E, double nu,
                       double* K);

/// Strain (Voigt xx,yy,zz,xy,yz,xz; engineering shear) at the element
/// centroid from nodal displacements.
std::array<double, 6> element_centroid_strain(const Mesh& mesh, int e,
                                              const std::vector<double>& u);

/// Strains at every integration point; `out` has 6 doubles per point.
void element_gp_strains(const Mesh& mesh, int e, const std::vector<double>& u,
                        double* out);

enum class StrainMeasure { VonMises, MinPrincipal };

/// Scalar equivalent of a Voigt strain: von Mises sqrt(2/3 e:e) of the
/// deviator, or the magnitude of the smallest principal strain.
double equivalent_strain(const std::array<double, 6>& eps, StrainMeasure measure);

// ===========================================================================
// Load cases
// ===========================================================================

struct DirichletSpec {
    std::vector<int> nodes;
    std::array<bool, 3> fixed{true, true, true};
    std::array<double, 3> value{0.0, 0.0, 0.0}; // mm
};

enum class MasterDofKind { Free, Imposed, Loaded };

struct MasterDof {
    MasterDofKind kind = MasterDofKind::Free;
    double value = 0.0; // displacement (Imposed) or force/moment (Loaded)
};

/// Small-rotation rigid coupling u_s = u_m + theta x (x_s - x_m).
/// DOF order: tx ty tz rx ry rz.
struct RigidCoupling {
    std::array<double, 3> master_point{0.0, 0.0, 0.0};
    std::vector<int> slaves;
    std::array<MasterDof, 6> dofs{};
};

struct LoadCase {
    ModelVariant variant = ModelVariant::Ensam;
    std::vector<DirichletSpec> dirichlet;
    std::vector<RigidCoupling> couplings;
    /// Optional plain nodal forces, 3*N (empty = none).
    std::vector<double> nodal_forces;
};

// ===========================================================================
// Constraint elimination (master-slave transformation u = T q + g)
// ===========================================================================

struct DofTerm {
    int q = -1;    // reduced column
    double c = 0.0;
};

/// Row of the transformation for one full DOF: u_i = sum c_t q_t + g.
struct DofRow {
    double g = 0.0;                  // imposed offset (scaled by the load factor)
    std::array<DofTerm, 7> terms{};  // identity row or coupling row (<= 7 terms)
    int n_terms = 0;
};

class ConstraintMap {
public:
    ConstraintMap(const Mesh& mesh, const LoadCase& lc);

    int n_full() const { return n_full_; }
    int n_reduced() const { return n_reduced_; }
    const DofRow& row(int full_dof) const { return rows_[full_dof]; }
    bool is_constrained(int full_dof) const { return constrained_[full_dof] != 0; }
    bool is_dirichlet(int full_dof) const { return dirichlet_[full_dof] != 0; }

    /// u_full = T q + scale*g  (size 3*N).
    std::vector<double> expand(const std::vector<double>& q, double scale) const;
    /// r_red = T^T r_full.
    std::vector<double> reduce_transpose(const std::vector<double>& r_full) const;
    /// External loads on Loaded master DOFs, already in reduced numbering.
    const std::vector<double>& master_loads() const { return master_loads_; }
    /// Reduced value of master DOF d (0..5) of coupling c, or the imposed
    /// value scaled by `scale` when the DOF is not retained.
    double master_value(int coupling, int dof, const std::vector<double>& q,
                        double scale) const;
    /// Full-space node DOFs driven by nonzero imposed values along `dir`.
    std::vector<int> driven_dofs(int dir) const;

private:
    int n_full_ = 0;
    int n_reduced_ = 0;
    std::vector<DofRow> rows_;
    std::vector<std::uint8_t> constrained_; // dirichlet or slave
    std::vector<std::uint8_t> dirichlet_;
    std::vector<double> master_loads_;
    std::vector<int> master_q_;     // 6 per coupling, -1 when imposed
    std::vector<double> master_g_;  // imposed values
};

// ===========================================================================
// Assembly and solves
// ===========================================================================

/// Global stiffness over all node DOFs (3*N), both triangles stored.
/// Element integration runs thread-parallel; accumulation order is fixed,
/// so the values are bitwise identical to assemble_serial().
CsrMatrix assemble(const Mesh& mesh, const MaterialMap& materials);
CsrMatrix assemble_serial(const Mesh& mesh, const MaterialMap& materials);

/// K_red = T^T K T restricted to retained DOFs.
CsrMatrix reduce_stiffness(const CsrMatrix& K, const ConstraintMap& map);

struct SolveOptions {
    double cg_rel_tol = 1e-10;
    int cg_max_iter_per_dof = 20;
    double newton_tol = 1e-6;  // relative to max(|f_ext|, 1 N)
    int newton_max_iter = 30;
    StrainMeasure strain_measure = StrainMeasure::VonMises;
};

struct LinearSolution {
    std::vector<double> u;        // 3*N mm
    std::vector<std::array<double, 6>> element_strain;
    std::vector<double> eq_strain;
    std::vector<double> reaction; // 3*N, nonzero at Dirichlet DOFs
    std::vector<double> master_q; // 6 per coupling (imposed slots hold values)
    int cg_iterations = 0;
    double equilibrium_residual = 0.0; // |sum reactions + sum applied| / max(|f|,1)
};

LinearSolution solve_linear(const Mesh& mesh, const MaterialMap& materials,
                            const LoadCase& lc, const SolveOptions& opts = {});

struct ReactionCurve {
    std::vector<double> overall_strain; // strictly increasing from 0
    std::vector<double> axial_reaction; // N, magnitude on the driven boundary
    int max_newton_iterations = 0;
    int total_cg_iterations = 0;
};

/// Displacement-controlled elasto-perfectly-plastic ramp: the load case's
/// imposed values are scaled k/n for k=1..n; von Mises radial return with
/// sigma_y = E*yield_strain at every integration point; modified Newton on
/// the elastic stiffness.
ReactionCurve solve_plastic(const Mesh& mesh, const MaterialMap& materials,
                            const LoadCase& lc, int n_increments,
                            double target_overall_strain,
                            const SolveOptions& opts = {});

/// Nodal internal forces assembled from per-gauss-point stresses (Voigt).
std::vector<double> internal_forces(const Mesh& mesh,
                                    const std::vector<double>& gp_stress);

} // namespace vertfe
