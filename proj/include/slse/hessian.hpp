#pragma once

#include <cstdint>

#include "slse/matrix.hpp"
#include "slse/rng.hpp"

namespace slse {

enum class SketchKind { srht, countsketch, gaussian, identity };

/// Fixed Hessian sketch H_hat = (S_hat X)'(S_hat X), held only through the R
/// factor of the thin QR of S_hat X. The Gram matrix is never formed, so
/// applying the inverse never squares the condition number.
struct HessianSketch {
    std::size_t r = 0;
    Matrix R;  // d x d upper triangular
    std::uint64_t flops_build = 0;
};

/// Draws an independent sketch of size r (fresh seed stream, decoupled from
/// the subproblem sketches) and factors S_hat X. Throws singular_error
/// advising a larger r if S_hat X loses column rank.
HessianSketch build_hessian_sketch(const Matrix& x, std::size_t r, Rng& rng,
                                   SketchKind kind = SketchKind::srht);

/// Factors an already-sketched block; the test-stub and reuse entry point.
HessianSketch build_hessian_from_sketch(const Matrix& sx);

/// H_hat^{-1} v through the stored R factor. Adds exactly 2 d^2 to `flops`.
Vector apply_inv(const HessianSketch& h, const Vector& v, std::uint64_t& flops);

Vector apply_inv(const HessianSketch& h, const Vector& v);

}  // namespace slse
