#include <algorithm>
#include <cmath>
#include <string>

#include "fem_internal.hpp"

namespace vertfe {

namespace {

enum class DofState : std::uint8_t { Retained, Dirichlet, Slave };

} // namespace

ConstraintMap::ConstraintMap(const Mesh& mesh, const LoadCase& lc) {
    const int n_nodes = mesh.n_nodes();
    n_full_ = 3 * n_nodes;
    rows_.assign(n_full_, DofRow{});
    constrained_.assign(n_full_, 0);
    dirichlet_.assign(n_full_, 0);

    std::vector<DofState> state(n_full_, DofState::Retained);
    std::vector<double> dir_value(n_full_, 0.0);
    std::vector<int> slave_coupling(n_full_, -1);

    auto claim = [&](int dof, DofState s) {
        if (state[dof] != DofState::Retained)
            fail_data("DuplicateConstraint",
                      "DOF " + std::to_string(dof) + " constrained more than once");
        state[dof] = s;
    };

    for (const auto& d : lc.dirichlet)
        for (int node : d.nodes) {
            if (node < 0 || node >= n_nodes)
                fail_data("BadNodeId", "Dirichlet node id out of range");
            for (int c = 0; c < 3; ++c) {
                if (!d.fixed[c]) continue;
                claim(3 * node + c, DofState::Dirichlet);
                dir_value[3 * node + c] = d.value[c];
            }
        }

    for (std::size_t m = 0; m < lc.couplings.size(); ++m) {
        const auto& cp = lc.couplings[m];
        if (cp.slaves.empty())
            fail_data("EmptyCoupling", "rigid coupling has no slave nodes");
        for (int node : cp.slaves) {
            if (node < 0 || node >= n_nodes)
                fail_data("BadNodeId", "coupling slave id out of range");
            for (int c = 0; c < 3; ++c) {
                claim(3 * node + c, DofState::Slave);
                slave_coupling[3 * node + c] = static_cast<int>(m);
            }
        }
    }

    // Reduced numbering: free node DOFs first, then free/loaded master DOFs.
    int q = 0;
    std::vector<int> node_q(n_full_, -1);
    for (int i = 0; i < n_full_; ++i)
        if (state[i] == DofState::Retained) node_q[i] = q++;

    const int n_couplings = static_cast<int>(lc.couplings.size());
    master_q_.assign(6 * n_couplings, -1);
    master_g_.assign(6 * n_couplings, 0.0);
    int n_fixing = 0;
    for (int i = 0; i < n_full_; ++i)
        if (state[i] == DofState::Dirichlet) ++n_fixing;
    for (int m = 0; m < n_couplings; ++m)
        for (int d = 0; d < 6; ++d) {
            const MasterDof& md = lc.couplings[m].dofs[d];
            if (md.kind == MasterDofKind::Imposed) {
                master_g_[6 * m + d] = md.value;
                ++n_fixing;
            } else {
                master_q_[6 * m + d] = q++;
            }
        }
    n_reduced_ = q;

    master_loads_.assign(n_reduced_, 0.0);
    for (int m = 0; m < n_couplings; ++m)
        for (int d = 0; d < 6; ++d) {
            const MasterDof& md = lc.couplings[m].dofs[d];
            if (md.kind == MasterDofKind::Loaded)
                master_loads_[master_q_[6 * m + d]] = md.value;
        }

    if (n_fixing < 6)
        fail_numerical("SingularSystem",
                       "fewer than 6 DOFs are fixed; rigid-body motion remains");

    // Build the transformation rows.
    for (int i = 0; i < n_full_; ++i) {
        DofRow& row = rows_[i];
        switch (state[i]) {
        case DofState::Retained:
            row.terms[0] = {node_q[i], 1.0};
            row.n_terms = 1;
            break;
        case DofState::Dirichlet:
            row.g = dir_value[i];
            constrained_[i] = 1;
            dirichlet_[i] = 1;
            break;
        case DofState::Slave: {
            constrained_[i] = 1;
            const int m = slave_coupling[i];
            const auto& cp = lc.couplings[m];
            const int node = i / 3;
            const int c = i % 3;
            const double r[3] = {mesh.nodes[node][0] - cp.master_point[0],
                                 mesh.nodes[node][1] - cp.master_point[1],
                                 mesh.nodes[node][2] - cp.master_point[2]};
            // u_c = t_c + (theta x r)_c
            // coefficients on (rx, ry, rz):
            double rc[3] = {0.0, 0.0, 0.0};
            if (c == 0) {
                rc[1] = r[2];
                rc[2] = -r[1];
            } else if (c == 1) {
                rc[0] = -r[2];
                rc[2] = r[0];
            } else {
                rc[0] = r[1];
                rc[1] = -r[0];
            }
            auto add = [&](int mdof, double coeff) {
                if (coeff == 0.0) return;
                const int qq = master_q_[6 * m + mdof];
                if (qq >= 0)
                    row.terms[row.n_terms++] = {qq, coeff};
                else
                    row.g += coeff * master_g_[6 * m + mdof];
            };
            add(c, 1.0);
            add(3, rc[0]);
            add(4, rc[1]);
            add(5, rc[2]);
            break;
        }
        }
    }
}

std::vector<double> ConstraintMap::expand(const std::vector<double>& q,
                                          double scale) const {
    std::vector<double> u(n_full_, 0.0);
    for (int i = 0; i < n_full_; ++i) {
        const DofRow& row = rows_[i];
        double v = scale * row.g;
        for (int t = 0; t < row.n_terms; ++t) v += row.terms[t].c * q[row.terms[t].q];
        u[i] = v;
    }
    return u;
}

std::vector<double> ConstraintMap::reduce_transpose(
    const std::vector<double>& r_full) const {
    std::vector<double> r(n_reduced_, 0.0);
    for (int i = 0; i < n_full_; ++i) {
        const DofRow& row = rows_[i];
        for (int t = 0; t < row.n_terms; ++t)
            r[row.terms[t].q] += row.terms[t].c * r_full[i];
    }
    return r;
}

double ConstraintMap::master_value(int coupling, int dof, const std::vector<double>& q,
                                   double scale) const {
    const int qq = master_q_[6 * coupling + dof];
    return qq >= 0 ? q[qq] : scale * master_g_[6 * coupling + dof];
}

std::vector<int> ConstraintMap::driven_dofs(int dir) const {
    std::vector<int> out;
    for (int i = dir; i < n_full_; i += 3)
        if (constrained_[i] && rows_[i].g != 0.0) out.push_back(i);
    return out;
}

} // namespace vertfe
