#include "slse/sketch.hpp"

#include <cmath>
#include <string>

#include "slse/error.hpp"

namespace slse {

SketchPlan build_srht_plan(std::size_t n, const std::vector<std::uint64_t>& sizes, Rng& rng) {
    if (n == 0) throw config_error("build_srht_plan: empty input");
    if (sizes.empty()) throw config_error("build_srht_plan: empty size list");
    for (std::size_t i = 1; i < sizes.size(); ++i)
        if (sizes[i] <= sizes[i - 1])
            throw config_error("build_srht_plan: sizes must be strictly increasing");

    SketchPlan plan;
    plan.n = n;
    plan.n_padded = next_pow2(n);
    if (sizes.back() > plan.n_padded)
        throw config_error("build_srht_plan: largest size " + std::to_string(sizes.back()) +
                           " exceeds padded length " + std::to_string(plan.n_padded));
    plan.sizes = sizes;

    plan.sign_flips.resize(plan.n_padded);
    for (auto& s : plan.sign_flips) s = rng.rademacher();
    plan.perm = rng.permutation(plan.n_padded);
    plan.row_order = rng.permutation(plan.n_padded);
    return plan;
}

SketchPlan build_srht_plan(std::size_t n, const std::vector<std::uint64_t>& sizes,
                           std::uint64_t seed) {
    Rng rng(seed);
    SketchPlan plan = build_srht_plan(n, sizes, rng);
    plan.seed = seed;
    return plan;
}

SketchedDataset apply_srht_full(const SketchPlan& plan, const Matrix& x, const Vector& y) {
    if (x.rows != plan.n || y.size() != plan.n)
        throw dim_error("apply_srht_full: data shape does not match the plan");

    const std::size_t np = plan.n_padded;
    const std::size_t d = x.cols;
    SketchedDataset ds;
    ds.n_padded = np;
    ds.row_order = plan.row_order;
    ds.sizes = plan.sizes;

    // Gather permuted rows into the padded buffers, apply the sign flips,
    // then transform column by column. Padded rows stay zero (a zero row of
    // both X and Y leaves the LS solution unchanged).
    ds.sx0 = Matrix(np, d);
    ds.sy0.assign(np, 0.0);
    for (std::size_t i = 0; i < np; ++i) {
        const std::size_t src = plan.perm[i];
        if (src >= plan.n) continue;
        const double sign = plan.sign_flips[i];
        for (std::size_t j = 0; j < d; ++j) ds.sx0(i, j) = sign * x(src, j);
        ds.sy0[i] = sign * y[src];
    }
    fwht_columns(ds.sx0);
    fwht_inplace(ds.sy0);

    ds.flops = static_cast<std::uint64_t>(np) * d * log2_exact(np);
    return ds;
}

std::pair<Matrix, Vector> extract_view(const SketchedDataset& ds, std::size_t i) {
    if (i >= ds.sizes.size())
        throw dim_error("extract_view: index " + std::to_string(i) + " out of range (K = " +
                        std::to_string(ds.sizes.size()) + ")");
    const std::size_t m = static_cast<std::size_t>(ds.sizes[i]);
    const std::size_t d = ds.sx0.cols;
    const double scale = std::sqrt(static_cast<double>(ds.n_padded) / static_cast<double>(m));

    Matrix a(m, d);
    Vector b(m);
    for (std::size_t k = 0; k < m; ++k) {
        const std::size_t row = ds.row_order[k];
        for (std::size_t j = 0; j < d; ++j) a(k, j) = scale * ds.sx0(row, j);
        b[k] = scale * ds.sy0[row];
    }
    return {std::move(a), std::move(b)};
}

std::pair<Matrix, Vector> countsketch_apply_with(std::size_t m,
                                                 const std::vector<std::uint32_t>& buckets,
                                                 const std::vector<double>& signs, const Matrix& x,
                                                 const Vector& y) {
    const std::size_t n = x.rows;
    if (y.size() != n || buckets.size() != n || signs.size() != n)
        throw dim_error("countsketch_apply: input lengths disagree");
    if (m < 1) throw config_error("countsketch_apply: m must be >= 1");

    Matrix a(m, x.cols);
    Vector b(m, 0.0);
    for (std::size_t row = 0; row < n; ++row) {
        const std::size_t k = buckets[row];
        const double s = signs[row];
        for (std::size_t j = 0; j < x.cols; ++j) a(k, j) += s * x(row, j);
        b[k] += s * y[row];
    }
    return {std::move(a), std::move(b)};
}

std::pair<Matrix, Vector> countsketch_apply(std::size_t m, const Matrix& x, const Vector& y,
                                            Rng& rng) {
    const std::size_t n = x.rows;
    std::vector<std::uint32_t> buckets(n);
    std::vector<double> signs(n);
    for (std::size_t row = 0; row < n; ++row) {
        buckets[row] = static_cast<std::uint32_t>(rng.uniform_below(m));
        signs[row] = rng.rademacher();
    }
    return countsketch_apply_with(m, buckets, signs, x, y);
}

std::pair<Matrix, Vector> gaussian_apply(std::size_t m, const Matrix& x, const Vector& y,
                                         Rng& rng) {
    const std::size_t n = x.rows;
    if (y.size() != n) throw dim_error("gaussian_apply: input lengths disagree");
    if (m < 1) throw config_error("gaussian_apply: m must be >= 1");
    const double scale = 1.0 / std::sqrt(static_cast<double>(m));

    Matrix a(m, x.cols);
    Vector b(m, 0.0);
    Vector srow(n);
    for (std::size_t k = 0; k < m; ++k) {
        for (std::size_t i = 0; i < n; ++i) srow[i] = scale * rng.normal();
        for (std::size_t j = 0; j < x.cols; ++j) a(k, j) = dot(srow, {x.col(j), n});
        b[k] = dot(srow, y);
    }
    return {std::move(a), std::move(b)};
}

double embedding_epsilon(const Matrix& u, const Matrix& sketched_u) {
    if (u.cols != sketched_u.cols) throw dim_error("embedding_epsilon: column counts differ");
    const std::size_t d = u.cols;

    Matrix gram_u(d, d);
    for (std::size_t j = 0; j < d; ++j)
        for (std::size_t i = 0; i < d; ++i)
            gram_u(i, j) = dot({u.col(i), u.rows}, {u.col(j), u.rows});
    for (std::size_t k = 0; k < d; ++k) gram_u(k, k) -= 1.0;
    if (spectral_norm_sym(gram_u) > 1e-8)
        throw dim_error("embedding_epsilon: U is not column-orthonormal");

    Matrix dev(d, d);
    for (std::size_t j = 0; j < d; ++j)
        for (std::size_t i = 0; i < d; ++i)
            dev(i, j) = dot({sketched_u.col(i), sketched_u.rows}, {sketched_u.col(j), sketched_u.rows});
    for (std::size_t k = 0; k < d; ++k) dev(k, k) -= 1.0;
    return spectral_norm_sym(dev, 1e-8);
}

}  // namespace slse
