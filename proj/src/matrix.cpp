#include "slse/matrix.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "slse/error.hpp"
#include "slse/rng.hpp"

namespace slse {

double dot(std::span<const double> x, std::span<const double> y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

double nrm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols != b.rows)
        throw dim_error("matmul: inner dimensions differ (" + std::to_string(a.cols) + " vs " +
                        std::to_string(b.rows) + ")");
    Matrix c(a.rows, b.cols);
    for (std::size_t j = 0; j < b.cols; ++j) {
        double* cj = c.col(j);
        for (std::size_t k = 0; k < a.cols; ++k) {
            const double bkj = b(k, j);
            if (bkj == 0.0) continue;
            const double* ak = a.col(k);
            for (std::size_t i = 0; i < a.rows; ++i) cj[i] += ak[i] * bkj;
        }
    }
    return c;
}

Vector matvec(const Matrix& a, const Vector& x) {
    if (a.cols != x.size()) throw dim_error("matvec: vector length does not match column count");
    Vector y(a.rows, 0.0);
    for (std::size_t k = 0; k < a.cols; ++k) {
        const double xk = x[k];
        const double* ak = a.col(k);
        for (std::size_t i = 0; i < a.rows; ++i) y[i] += ak[i] * xk;
    }
    return y;
}

Vector matvec_t(const Matrix& a, const Vector& x) {
    if (a.rows != x.size()) throw dim_error("matvec_t: vector length does not match row count");
    Vector y(a.cols);
    for (std::size_t k = 0; k < a.cols; ++k) y[k] = dot({a.col(k), a.rows}, x);
    return y;
}

Matrix transpose(const Matrix& a) {
    Matrix t(a.cols, a.rows);
    for (std::size_t j = 0; j < a.cols; ++j)
        for (std::size_t i = 0; i < a.rows; ++i) t(j, i) = a(i, j);
    return t;
}

namespace {

// Householder factorization in place: on return the upper triangle of `a`
// holds R, the lower part holds the reflector tails, `tau` the scalars.
void householder_factor(Matrix& a, std::vector<double>& tau) {
    const std::size_t m = a.rows, n = a.cols;
    if (m < n) throw dim_error("qr: need rows >= cols");
    tau.assign(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        double* x = a.col(k) + k;
        const std::size_t len = m - k;
        double norm = nrm2({x, len});
        if (norm == 0.0) {
            tau[k] = 0.0;
            continue;
        }
        double alpha = x[0] >= 0.0 ? -norm : norm;
        const double v0 = x[0] - alpha;
        x[0] = alpha;
        // v = (1, x[1:]/v0); tau = -v0/alpha
        for (std::size_t i = 1; i < len; ++i) x[i] /= v0;
        tau[k] = -v0 / alpha;
        // Apply to trailing columns.
        for (std::size_t j = k + 1; j < n; ++j) {
            double* y = a.col(j) + k;
            double s = y[0];
            for (std::size_t i = 1; i < len; ++i) s += x[i] * y[i];
            s *= tau[k];
            y[0] -= s;
            for (std::size_t i = 1; i < len; ++i) y[i] -= s * x[i];
        }
    }
}

void apply_reflector_left(const Matrix& a, const std::vector<double>& tau, std::size_t k,
                          std::span<double> y) {
    const std::size_t m = a.rows;
    const double* x = a.col(k) + k;
    const std::size_t len = m - k;
    if (tau[k] == 0.0) return;
    double s = y[k];
    for (std::size_t i = 1; i < len; ++i) s += x[i] * y[k + i];
    s *= tau[k];
    y[k] -= s;
    for (std::size_t i = 1; i < len; ++i) y[k + i] -= s * x[i];
}

void check_rank(const Matrix& packed, std::size_t m, std::size_t n) {
    double max_diag = 0.0;
    for (std::size_t k = 0; k < n; ++k) max_diag = std::max(max_diag, std::abs(packed(k, k)));
    const double tol =
        std::numeric_limits<double>::epsilon() * static_cast<double>(std::max(m, n)) * max_diag;
    for (std::size_t k = 0; k < n; ++k) {
        if (!(std::abs(packed(k, k)) > tol))
            throw singular_error("qr: column " + std::to_string(k) +
                                 " is numerically rank deficient (|R_kk| = " +
                                 std::to_string(std::abs(packed(k, k))) + ")");
    }
}

Matrix extract_r(const Matrix& packed, std::size_t n) {
    Matrix r(n, n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i <= j; ++i) r(i, j) = packed(i, j);
    return r;
}

}  // namespace

QrFactors qr_thin(const Matrix& a) {
    const std::size_t m = a.rows, n = a.cols;
    Matrix packed = a;
    std::vector<double> tau;
    householder_factor(packed, tau);
    check_rank(packed, m, n);
    Matrix r = extract_r(packed, n);

    // Q = H_0 ... H_{n-1} applied to the first n columns of I, accumulated
    // backward.
    Matrix q(m, n);
    for (std::size_t j = 0; j < n; ++j) q(j, j) = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
        std::span<double> col(q.col(j), m);
        for (std::size_t k = n; k-- > 0;) apply_reflector_left(packed, tau, k, col);
    }

    // Sign convention: R diagonal nonnegative.
    for (std::size_t k = 0; k < n; ++k) {
        if (r(k, k) < 0.0) {
            for (std::size_t j = k; j < n; ++j) r(k, j) = -r(k, j);
            double* qc = q.col(k);
            for (std::size_t i = 0; i < m; ++i) qc[i] = -qc[i];
        }
    }
    if (!all_finite(r.data)) throw numeric_error("qr: nonfinite entries in R");
    return {std::move(q), std::move(r)};
}

Matrix qr_r_only(const Matrix& a) {
    Matrix packed = a;
    std::vector<double> tau;
    householder_factor(packed, tau);
    check_rank(packed, a.rows, a.cols);
    Matrix r = extract_r(packed, a.cols);
    for (std::size_t k = 0; k < a.cols; ++k) {
        if (r(k, k) < 0.0)
            for (std::size_t j = k; j < a.cols; ++j) r(k, j) = -r(k, j);
    }
    if (!all_finite(r.data)) throw numeric_error("qr: nonfinite entries in R");
    return r;
}

Vector householder_ls(Matrix a, Vector b) {
    const std::size_t m = a.rows, n = a.cols;
    if (b.size() != m) throw dim_error("householder_ls: rhs length does not match rows");
    std::vector<double> tau;
    householder_factor(a, tau);
    check_rank(a, m, n);
    for (std::size_t k = 0; k < n; ++k) apply_reflector_left(a, tau, k, b);
    // Back substitution on the packed R.
    Vector x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= a(i, j) * x[j];
        x[i] = s / a(i, i);
    }
    return x;
}

namespace {

void check_triangular_diag(const Matrix& r) {
    if (r.rows != r.cols) throw dim_error("triangular solve: matrix not square");
    double max_diag = 0.0;
    for (std::size_t k = 0; k < r.rows; ++k) max_diag = std::max(max_diag, std::abs(r(k, k)));
    const double tol = std::numeric_limits<double>::epsilon() * static_cast<double>(r.rows) * max_diag;
    for (std::size_t k = 0; k < r.rows; ++k)
        if (!(std::abs(r(k, k)) > tol))
            throw singular_error("triangular solve: zero or near-zero diagonal at index " +
                                 std::to_string(k));
}

}  // namespace

Vector tri_upper_solve(const Matrix& r, const Vector& v) {
    check_triangular_diag(r);
    if (v.size() != r.cols) throw dim_error("tri_upper_solve: length mismatch");
    const std::size_t n = r.cols;
    Vector x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = v[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= r(i, j) * x[j];
        x[i] = s / r(i, i);
    }
    return x;
}

Vector tri_lower_solve_t(const Matrix& r, const Vector& v) {
    check_triangular_diag(r);
    if (v.size() != r.cols) throw dim_error("tri_lower_solve_t: length mismatch");
    const std::size_t n = r.cols;
    Vector x(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = v[i];
        for (std::size_t j = 0; j < i; ++j) s -= r(j, i) * x[j];
        x[i] = s / r(i, i);
    }
    return x;
}

Vector tri_solve_pair(const Matrix& r, const Vector& v) {
    Vector w = tri_lower_solve_t(r, v);
    return tri_upper_solve(r, w);
}

void fwht_inplace(std::span<double> x) {
    const std::size_t n = x.size();
    if (!is_pow2(n))
        throw dim_error("fwht: length " + std::to_string(n) +
                        " is not a power of two; pad the input with zeros");
    for (std::size_t h = 1; h < n; h <<= 1) {
        for (std::size_t i = 0; i < n; i += h << 1) {
            for (std::size_t j = i; j < i + h; ++j) {
                const double u = x[j];
                const double v = x[j + h];
                x[j] = u + v;
                x[j + h] = u - v;
            }
        }
    }
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (auto& v : x) v *= scale;
}

Vector fwht_normalized(Vector x) {
    fwht_inplace(x);
    return x;
}

void fwht_columns(Matrix& m) {
    for (std::size_t j = 0; j < m.cols; ++j) fwht_inplace({m.col(j), m.rows});
}

double frobenius_norm(const Matrix& a) { return nrm2(a.data); }

double spectral_norm_sym(const Matrix& m, double tol, int max_iter) {
    if (m.rows != m.cols) throw dim_error("spectral_norm_sym: matrix not square");
    const std::size_t n = m.rows;
    if (n == 0) return 0.0;
    Rng rng(0x5eedful);
    Vector v(n);
    for (auto& e : v) e = rng.normal();
    double norm = nrm2(v);
    if (norm == 0.0) v[0] = norm = 1.0;
    for (auto& e : v) e /= norm;
    double lambda2 = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        Vector w = matvec(m, matvec(m, v));  // M^2 v
        const double next = dot(v, w);
        const double wn = nrm2(w);
        if (wn == 0.0) return 0.0;
        for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / wn;
        if (it > 0 && std::abs(next - lambda2) <= tol * std::max(1.0, std::abs(next))) {
            lambda2 = next;
            break;
        }
        lambda2 = next;
    }
    return std::sqrt(std::max(0.0, lambda2));
}

bool all_finite(std::span<const double> x) {
    for (double v : x)
        if (!std::isfinite(v)) return false;
    return true;
}

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_pow2(std::size_t n) {
    if (n <= 1) return 1;
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

std::size_t log2_exact(std::size_t n) {
    std::size_t k = 0;
    while ((std::size_t{1} << k) < n) ++k;
    return k;
}

}  // namespace slse
