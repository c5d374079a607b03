#pragma once
#include <vector>
#include <cstddef>

namespace popdyn {

// dense square matrix, row-major; small K only (uniformization, eigensolves)
struct Matrix {
    std::size_t n = 0;
    std::vector<double> a;

    Matrix() = default;
    explicit Matrix(std::size_t n_) : n(n_), a(n_ * n_, 0.0) {}
    double& operator()(std::size_t i, std::size_t j) { return a[i * n + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a[i * n + j]; }

    static Matrix identity(std::size_t n);
};

Matrix mat_mul(const Matrix& x, const Matrix& y);
std::vector<double> mat_vec(const Matrix& m, const std::vector<double>& v);
std::vector<double> vec_mat(const std::vector<double>& v, const Matrix& m);

// e^{tQ} for a conservative rate matrix Q (rows sum to 0, off-diagonals >= 0)
// by uniformization: P = I + Q/q, e^{tQ} = sum_k Pois(qt,k) P^k, truncated when
// the Poisson tail drops below `tail_tol` (entrywise error bound since ||P^k|| <= 1).
Matrix matrix_exp_uniformization(const Matrix& q_mat, double t, double tail_tol = 1e-13);

// Gaussian elimination with partial pivoting; throws on (numerically) singular
std::vector<double> solve_linear(Matrix a, std::vector<double> b);

// eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations;
// returns eigenvalues ascending, columns of `vectors` are eigenvectors
struct SymmetricEigen {
    std::vector<double> values;
    Matrix vectors;
};
SymmetricEigen jacobi_eigen(Matrix m, int max_sweeps = 64);

} // namespace popdyn
