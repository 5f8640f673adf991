#include "slse/hessian.hpp"

#include <string>

#include "slse/error.hpp"
#include "slse/sketch.hpp"

namespace slse {

HessianSketch build_hessian_sketch(const Matrix& x, std::size_t r, Rng& rng, SketchKind kind) {
    if (r < x.cols)
        throw config_error("build_hessian_sketch: r = " + std::to_string(r) +
                           " is below the column count d = " + std::to_string(x.cols));
    const Vector dummy_y(x.rows, 0.0);
    Matrix sx;
    std::uint64_t sketch_flops = 0;
    switch (kind) {
        case SketchKind::srht: {
            SketchPlan plan = build_srht_plan(x.rows, {r}, rng);
            SketchedDataset ds = apply_srht_full(plan, x, dummy_y);
            sx = extract_view(ds, 0).first;
            sketch_flops = ds.flops;
            break;
        }
        case SketchKind::countsketch:
            sx = countsketch_apply(r, x, dummy_y, rng).first;
            sketch_flops = 2ull * x.rows * x.cols;
            break;
        case SketchKind::gaussian:
            sx = gaussian_apply(r, x, dummy_y, rng).first;
            sketch_flops = 2ull * r * x.rows * x.cols;
            break;
        case SketchKind::identity:
            if (r != x.rows)
                throw config_error("build_hessian_sketch: identity sketch requires r == rows");
            sx = x;
            break;
    }
    HessianSketch h = build_hessian_from_sketch(sx);
    h.flops_build += sketch_flops;
    return h;
}

HessianSketch build_hessian_from_sketch(const Matrix& sx) {
    HessianSketch h;
    h.r = sx.rows;
    try {
        h.R = qr_r_only(sx);
    } catch (const singular_error& e) {
        throw singular_error(std::string(e.what()) +
                             "; the sketched block is rank deficient, use a larger r");
    }
    // Householder QR of an r x d block, dominant term.
    h.flops_build = 2ull * sx.rows * sx.cols * sx.cols;
    return h;
}

Vector apply_inv(const HessianSketch& h, const Vector& v, std::uint64_t& flops) {
    flops += 2ull * h.R.cols * h.R.cols;
    return tri_solve_pair(h.R, v);
}

Vector apply_inv(const HessianSketch& h, const Vector& v) {
    std::uint64_t scratch = 0;
    return apply_inv(h, v, scratch);
}

}  // namespace slse
