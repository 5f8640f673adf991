#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "slse/matrix.hpp"
#include "slse/rng.hpp"

namespace slse {

/// Seeded description of the SRHT pipeline S = (n_padded/m)^(1/2) B H D P.
/// The Bernoulli sampling matrix B is realized as a fixed-size uniform prefix
/// of row_order, which makes every realized sketch size exact and the row
/// subsets nested across sizes for free.
struct SketchPlan {
    std::size_t n = 0;         // original row count
    std::size_t n_padded = 0;  // next power of two >= n
    std::vector<double> sign_flips;       // D, i.i.d. Rademacher
    std::vector<std::uint32_t> perm;      // P, uniform permutation
    std::vector<std::uint32_t> row_order; // prefix sampling order for B
    std::vector<std::uint64_t> sizes;     // m_1 < ... < m_K
    std::uint64_t seed = 0;
};

/// Full-scale rotated data (S_0 X, S_0 Y) = (HDP X, HDP Y) plus the sampling
/// metadata needed to extract the nested views.
struct SketchedDataset {
    std::size_t n_padded = 0;
    Matrix sx0;
    Vector sy0;
    std::vector<std::uint32_t> row_order;
    std::vector<std::uint64_t> sizes;
    std::uint64_t flops = 0;  // accounted cost: n_padded * d * log2(n_padded)
};

SketchPlan build_srht_plan(std::size_t n, const std::vector<std::uint64_t>& sizes, Rng& rng);

/// Seeded convenience: draws from Rng(seed) and records the seed in the plan
/// (the run wrapper derives its independent Hessian stream from it).
SketchPlan build_srht_plan(std::size_t n, const std::vector<std::uint64_t>& sizes,
                           std::uint64_t seed);

/// Pads (X, Y) with zero rows to n_padded and applies P, then D, then the
/// column-wise normalized FWHT.
SketchedDataset apply_srht_full(const SketchPlan& plan, const Matrix& x, const Vector& y);

/// The i-th scaled view (S_i X, S_i Y) = sqrt(n_padded/m_i) B_i (S_0 X, S_0 Y),
/// i in [0, K).
std::pair<Matrix, Vector> extract_view(const SketchedDataset& ds, std::size_t i);

/// CountSketch: every input row is added, with a random sign, into one of m
/// output rows. O(nd) cost.
std::pair<Matrix, Vector> countsketch_apply(std::size_t m, const Matrix& x, const Vector& y,
                                            Rng& rng);

/// Deterministic-input variant used by tests and by countsketch_apply itself.
std::pair<Matrix, Vector> countsketch_apply_with(std::size_t m,
                                                 const std::vector<std::uint32_t>& buckets,
                                                 const std::vector<double>& signs, const Matrix& x,
                                                 const Vector& y);

/// Dense Gaussian sketch with entries N(0, 1/m). O(mnd) cost; testing only.
std::pair<Matrix, Vector> gaussian_apply(std::size_t m, const Matrix& x, const Vector& y,
                                         Rng& rng);

/// Subspace-embedding distortion ||(SU)'(SU) - I|| for a column-orthonormal U.
double embedding_epsilon(const Matrix& u, const Matrix& sketched_u);

}  // namespace slse
