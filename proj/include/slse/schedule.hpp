#pragma once

#include <cstdint>
#include <vector>

namespace slse {

/// Orientation of the size ratio r(i-1, i) in the iteration-count lower
/// bound. The two appendix derivations disagree on which way the fraction
/// points; `increasing` (ratio > 1, the error-ratio direction) is the
/// default, `reciprocal` is kept switchable for comparison.
enum class RatioOrientation { increasing, reciprocal };

/// Doubling size schedule: m_1 = next_pow2(m1_mult * d) up to m_K = n_padded/2.
std::vector<std::uint64_t> default_sizes(std::size_t n_padded, std::size_t d,
                                         std::size_t m1_mult = 8);

/// Lower bound on the iteration count of subproblem i (1-based, i >= 2):
/// ceil(log3(((1+omega) r(i-1,i) + 1) / omega)), never below 1.
int a_lower_bound(std::size_t i, const std::vector<std::uint64_t>& sizes, std::size_t d,
                  double omega, RatioOrientation orient = RatioOrientation::increasing);

/// Same bound before the ceiling; used by the property tests.
double a_lower_bound_raw(std::size_t i, const std::vector<std::uint64_t>& sizes, std::size_t d,
                         double omega, RatioOrientation orient = RatioOrientation::increasing);

/// Lower bound for the first subproblem: ceil(log3(init_ratio / omega)),
/// never below 1. init_ratio estimates E||X(b0 - bt1)|| / E||X(bt1 - b)||.
int a1_lower_bound(double init_ratio, double omega);
double a1_lower_bound_raw(double init_ratio, double omega);

/// Closed-form FLOP budget of the three phases. The initialization term
/// covers the data-sketching pass only; the per-iteration terms are
/// (4d+1)m + 2d^2 + 5d exactly.
struct FlopBudget {
    std::uint64_t init = 0;
    std::uint64_t stage1 = 0;
    std::uint64_t stage2 = 0;
    std::uint64_t total() const { return init + stage1 + stage2; }
};

FlopBudget flop_budget(std::size_t n, std::size_t n_padded, std::size_t d,
                       const std::vector<std::uint64_t>& sizes, const std::vector<int>& a,
                       std::size_t t2);

/// Per-iteration cost of one momentum step against an m-row block.
std::uint64_t step_flops(std::size_t d, std::size_t m);

}  // namespace slse
