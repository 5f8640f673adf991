#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace slse {

using Vector = std::vector<double>;

/// Dense column-major matrix. Element (i, j) lives at data[i + j*rows].
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& operator()(std::size_t i, std::size_t j) { return data[i + j * rows]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i + j * rows]; }

    double* col(std::size_t j) { return data.data() + j * rows; }
    const double* col(std::size_t j) const { return data.data() + j * rows; }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }
};

struct QrFactors {
    Matrix q;  // rows x cols, orthonormal columns
    Matrix r;  // cols x cols, upper triangular, nonnegative diagonal
};

// BLAS-1 style helpers.
double dot(std::span<const double> x, std::span<const double> y);
double nrm2(std::span<const double> x);
void axpy(double alpha, std::span<const double> x, std::span<double> y);

Matrix matmul(const Matrix& a, const Matrix& b);
Vector matvec(const Matrix& a, const Vector& x);    // A x
Vector matvec_t(const Matrix& a, const Vector& x);  // A' x
Matrix transpose(const Matrix& a);

/// Thin Householder QR with R's diagonal made nonnegative. Requires
/// rows >= cols; throws singular_error naming the first rank-deficient column.
QrFactors qr_thin(const Matrix& a);

/// R factor only (the Q reflectors are discarded). Same contract as qr_thin.
Matrix qr_r_only(const Matrix& a);

/// Least-squares solution of min ||a x - b|| via Householder QR, applying the
/// reflectors to b on the fly.
Vector householder_ls(Matrix a, Vector b);

Vector tri_upper_solve(const Matrix& r, const Vector& v);    // R x = v
Vector tri_lower_solve_t(const Matrix& r, const Vector& v);  // R' x = v

/// Solves R'R w = v with one forward and one backward substitution.
Vector tri_solve_pair(const Matrix& r, const Vector& v);

/// In-place normalized Walsh-Hadamard transform: x <- H x with H orthonormal.
/// Length must be a power of two. Butterfly passes first, one n^(-1/2)
/// scaling pass at the end.
void fwht_inplace(std::span<double> x);

/// Copying convenience over fwht_inplace.
Vector fwht_normalized(Vector x);

/// Column-wise normalized FWHT of a matrix whose row count is a power of two.
void fwht_columns(Matrix& m);

double frobenius_norm(const Matrix& a);

/// Spectral norm of a symmetric matrix by power iteration on M*M (converges
/// on the dominant |eigenvalue| even when the extremes tie in magnitude).
double spectral_norm_sym(const Matrix& m, double tol = 1e-10, int max_iter = 20000);

bool all_finite(std::span<const double> x);

bool is_pow2(std::size_t n);
std::size_t next_pow2(std::size_t n);
std::size_t log2_exact(std::size_t n);

}  // namespace slse
