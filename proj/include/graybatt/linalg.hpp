#pragma once

#include <cstddef>
#include <vector>

namespace graybatt {

// Row-major dense matrix of doubles.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
    double* row(std::size_t r) { return data.data() + r * cols; }
    const double* row(std::size_t r) const { return data.data() + r * cols; }
};

namespace linalg {

// Solve (G + damping*I) x = b for symmetric positive definite G.
// Returns false if the Cholesky factorization hits a non-positive pivot.
bool cholesky_solve(const Matrix& g, double damping, const std::vector<double>& b,
                    std::vector<double>& x);

// Solve A x = b by Gaussian elimination with partial pivoting (small systems).
// Returns false on a (numerically) singular matrix.
bool gauss_solve(Matrix a, std::vector<double> b, std::vector<double>& x);

// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
// On return eigvals[i] pairs with eigvecs column i (eigvecs is m x m).
void sym_eig(const Matrix& g, std::vector<double>& eigvals, Matrix& eigvecs);

// Minimum-norm solution of G x = b for symmetric positive semidefinite G
// (pseudoinverse through sym_eig; eigenvalues below rel_tol * max are dropped).
std::vector<double> pinv_solve_sym(const Matrix& g, const std::vector<double>& b,
                                   double rel_tol = 1e-12);

// Thin SVD a = U diag(sigma) V^T via one-sided Jacobi orthogonalization.
// a is n x m with n >= 1; U is n x m, sigma length m (descending), V is m x m.
// Columns of U paired with sigma == 0 are zero vectors.
struct ThinSvd {
    Matrix u;
    std::vector<double> sigma;
    Matrix v;
};
ThinSvd svd_thin(const Matrix& a);

}  // namespace linalg
}  // namespace graybatt
