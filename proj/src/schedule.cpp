#include "slse/schedule.hpp"

#include <cmath>
#include <string>

#include "slse/error.hpp"
#include "slse/matrix.hpp"

namespace slse {

std::vector<std::uint64_t> default_sizes(std::size_t n_padded, std::size_t d,
                                         std::size_t m1_mult) {
    if (!is_pow2(n_padded)) throw config_error("default_sizes: n_padded must be a power of two");
    const std::uint64_t m1 = next_pow2(m1_mult * d);
    const std::uint64_t mk = n_padded / 2;
    if (m1 > mk)
        throw config_error("default_sizes: m_1 = " + std::to_string(m1) + " exceeds n_padded/2 = " +
                           std::to_string(mk) + "; use a smaller d or a larger n");
    std::vector<std::uint64_t> sizes;
    for (std::uint64_t m = m1; m <= mk; m *= 2) sizes.push_back(m);
    return sizes;
}

double a_lower_bound_raw(std::size_t i, const std::vector<std::uint64_t>& sizes, std::size_t d,
                         double omega, RatioOrientation orient) {
    if (i < 2 || i > sizes.size())
        throw config_error("a_lower_bound: subproblem index must satisfy 2 <= i <= K");
    if (!(omega > 0.0 && omega < 1.0))
        throw config_error("a_lower_bound: omega must lie in (0, 1)");
    const double m_prev = static_cast<double>(sizes[i - 2]);
    const double m_cur = static_cast<double>(sizes[i - 1]);
    const double dd = static_cast<double>(d);
    if (m_prev <= dd)
        throw config_error("a_lower_bound: m_{i-1} = " + std::to_string(sizes[i - 2]) +
                           " must exceed d = " + std::to_string(d));
    double ratio = std::sqrt((m_cur - dd) / (m_prev - dd));
    if (orient == RatioOrientation::reciprocal) ratio = 1.0 / ratio;
    return std::log((1.0 + omega) * ratio + 1.0) / std::log(3.0) - std::log(omega) / std::log(3.0);
}

int a_lower_bound(std::size_t i, const std::vector<std::uint64_t>& sizes, std::size_t d,
                  double omega, RatioOrientation orient) {
    const double raw = a_lower_bound_raw(i, sizes, d, omega, orient);
    return std::max(1, static_cast<int>(std::ceil(raw)));
}

double a1_lower_bound_raw(double init_ratio, double omega) {
    if (!(init_ratio > 0.0)) throw config_error("a1_lower_bound: init_ratio must be positive");
    if (!(omega > 0.0)) throw config_error("a1_lower_bound: omega must be positive");
    return std::log(init_ratio / omega) / std::log(3.0);
}

int a1_lower_bound(double init_ratio, double omega) {
    const double raw = a1_lower_bound_raw(init_ratio, omega);
    return std::max(1, static_cast<int>(std::ceil(raw)));
}

std::uint64_t step_flops(std::size_t d, std::size_t m) {
    return (4ull * d + 1ull) * m + 2ull * d * d + 5ull * d;
}

FlopBudget flop_budget(std::size_t n, std::size_t n_padded, std::size_t d,
                       const std::vector<std::uint64_t>& sizes, const std::vector<int>& a,
                       std::size_t t2) {
    if (a.size() != sizes.size())
        throw config_error("flop_budget: schedule lengths disagree (sizes " +
                           std::to_string(sizes.size()) + ", a " + std::to_string(a.size()) + ")");
    FlopBudget budget;
    if (!sizes.empty())
        budget.init = static_cast<std::uint64_t>(n_padded) * d * log2_exact(n_padded);
    for (std::size_t i = 0; i < sizes.size(); ++i)
        budget.stage1 += static_cast<std::uint64_t>(a[i]) * step_flops(d, sizes[i]);
    budget.stage2 = static_cast<std::uint64_t>(t2) * step_flops(d, n);
    return budget;
}

}  // namespace slse
