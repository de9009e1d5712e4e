#include "vertfe/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vertfe/error.hpp"
#include "vertfe/runtime.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace vertfe {

double CsrMatrix::at(int i, int j) const {
    for (int p = row_ptr[i]; p < row_ptr[i + 1]; ++p)
        if (col[p] == j) return val[p];
    return 0.0;
}

double& CsrMatrix::ref(int i, int j) {
    const int lo = row_ptr[i], hi = row_ptr[i + 1];
    auto it = std::lower_bound(col.begin() + lo, col.begin() + hi, j);
    if (it == col.begin() + hi || *it != j)
        fail_numerical("PatternMiss", "CSR entry (" + std::to_string(i) + "," +
                                          std::to_string(j) + ") not in pattern");
    return val[static_cast<std::size_t>(it - col.begin())];
}

std::vector<double> CsrMatrix::diagonal() const {
    std::vector<double> d(n, 0.0);
    for (int i = 0; i < n; ++i) d[i] = at(i, i);
    return d;
}

void spmv_serial(const CsrMatrix& A, const double* x, double* y) {
    for (int i = 0; i < A.n; ++i) {
        double s = 0.0;
        for (int p = A.row_ptr[i]; p < A.row_ptr[i + 1]; ++p)
            s += A.val[p] * x[A.col[p]];
        y[i] = s;
    }
}

void spmv(const CsrMatrix& A, const double* x, double* y) {
#ifdef _OPENMP
    const int nt = threads();
    if (nt > 1 && A.n > 2048) {
#pragma omp parallel for schedule(static) num_threads(nt)
        for (int i = 0; i < A.n; ++i) {
            double s = 0.0;
            for (int p = A.row_ptr[i]; p < A.row_ptr[i + 1]; ++p)
                s += A.val[p] * x[A.col[p]];
            y[i] = s;
        }
        return;
    }
#endif
    spmv_serial(A, x, y);
}

namespace {

// Serial reductions: bitwise-reproducible for any thread count.
double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

} // namespace

PcgResult pcg_solve(const CsrMatrix& A, const std::vector<double>& b,
                    std::vector<double>& x, double rel_tol, int max_iter) {
    const int n = A.n;
    x.assign(n, 0.0);

    std::vector<double> diag = A.diagonal();
    for (int i = 0; i < n; ++i) {
        if (!(diag[i] > 0.0))
            fail_numerical("SingularSystem",
                           "non-positive diagonal at reduced DOF " + std::to_string(i));
        diag[i] = 1.0 / diag[i];
    }

    std::vector<double> r = b, z(n), p(n), Ap(n);
    const double bnorm = std::sqrt(dot(b, b));
    PcgResult res;
    if (bnorm == 0.0) {
        res.converged = true;
        return res;
    }

    for (int i = 0; i < n; ++i) z[i] = diag[i] * r[i];
    p = z;
    double rz = dot(r, z);

    for (int it = 0; it < max_iter; ++it) {
        spmv(A, p.data(), Ap.data());
        const double pAp = dot(p, Ap);
        if (!(pAp > 0.0))
            fail_numerical("SingularSystem",
                           "non-positive curvature in CG (insufficient constraints?)");
        const double alpha = rz / pAp;
        for (int i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * Ap[i];
        }
        const double rnorm = std::sqrt(dot(r, r));
        res.iterations = it + 1;
        res.rel_residual = rnorm / bnorm;
        if (res.rel_residual <= rel_tol) {
            res.converged = true;
            return res;
        }
        for (int i = 0; i < n; ++i) z[i] = diag[i] * r[i];
        const double rz_new = dot(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    fail_numerical("NoConvergence", "CG did not reach " + std::to_string(rel_tol) +
                                        " within " + std::to_string(max_iter) +
                                        " iterations (residual " +
                                        std::to_string(res.rel_residual) + ")");
}

} // namespace vertfe
