#pragma once

#include <vector>

namespace vertfe {

/// Compressed sparse row, symmetric matrices store both triangles.
struct CsrMatrix {
    int n = 0;
    std::vector<int> row_ptr; // n+1
    std::vector<int> col;
    std::vector<double> val;

    std::size_t nnz() const { return col.size(); }
    /// Value at (i,j), 0 if outside the pattern.
    double at(int i, int j) const;
    /// Reference into val for pattern entry (i,j); j must be in the pattern.
    double& ref(int i, int j);
    std::vector<double> diagonal() const;
};

/// y = A x. Row-parallel; per-row accumulation order is fixed, so the
/// result is bitwise identical to spmv_serial for any thread count.
void spmv(const CsrMatrix& A, const double* x, double* y);
void spmv_serial(const CsrMatrix& A, const double* x, double* y);

struct PcgResult {
    int iterations = 0;
    double rel_residual = 0.0;
    bool converged = false;
};

/// Jacobi-preconditioned conjugate gradients for SPD systems. Throws
/// Error("SingularSystem") when a search direction has non-positive
/// curvature and Error("NoConvergence") past max_iter.
PcgResult pcg_solve(const CsrMatrix& A, const std::vector<double>& b,
                    std::vector<double>& x, double rel_tol, int max_iter);

} // namespace vertfe
