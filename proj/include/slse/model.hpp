#pragma once

#include <cstdint>
#include <string>

#include "slse/matrix.hpp"
#include "slse/rng.hpp"

namespace slse {

/// Synthetic linear model Y = X beta + zeta with a controlled condition
/// number. X = U diag(s) V' where U, V are Haar-distributed orthonormal
/// factors and s is log-spaced on [1, kappa]. The noise is regenerable from
/// the stored seed.
struct LinearModel {
    std::size_t n = 0;
    std::size_t d = 0;
    double kappa = 1.0;
    double sigma2 = 0.0;
    std::uint64_t seed = 0;
    Matrix x;
    Vector beta_true;
    Vector y;
};

LinearModel gen_model(std::size_t n, std::size_t d, double kappa, double sigma2,
                      std::uint64_t seed);

/// Replaces the noise realization (and Y) keeping X and beta fixed.
void redraw_noise(LinearModel& model, std::uint64_t noise_seed);

/// Exact OLS estimate via thin QR of X: solves R'R b = X'Y with two
/// triangular solves, then applies one residual-correction pass.
Vector ols_solve(const LinearModel& model);

/// Prediction error ||X (b - beta_true)||^2.
double pred_error(const LinearModel& model, const Vector& b);

// Flat binary snapshot: magic, version, n, d, sigma2, kappa, seed as
// little-endian 64-bit fields, then X (column-major), beta, Y as f64.
void model_save(const LinearModel& model, const std::string& path);
LinearModel model_load(const std::string& path);

}  // namespace slse
