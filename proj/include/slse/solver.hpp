#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "slse/hessian.hpp"
#include "slse/matrix.hpp"
#include "slse/model.hpp"
#include "slse/schedule.hpp"
#include "slse/sketch.hpp"

namespace slse {

enum class StopMode { oracle, residual };

/// Iteration parameters. mu and eta left as NaN resolve to the practical
/// defaults eta = d/r and mu = (1 - eta)^2; the theorem setting is mu = 1,
/// eta = 53/36 - sqrt(17)/3 with |mu - 1| <= 1/4 enforced when requested.
struct SolverConfig {
    double mu = std::numeric_limits<double>::quiet_NaN();
    double eta = std::numeric_limits<double>::quiet_NaN();
    double r_mult = 6.0;
    std::vector<int> a;              // per-subproblem counts; size 1 broadcasts
    bool theorem4_schedule = false;  // derive a_i from the omega lower bounds
    bool theorem_params = false;     // validate |mu-1| <= 1/4 and use theorem eta
    double omega = 0.0625;
    std::size_t t_max = 100;
    StopMode stop = StopMode::oracle;
    double stop_target = 0.0;  // oracle: absolute prediction-error target
    double stop_tol = 1e-10;   // residual: relative normal-equations tolerance
};

constexpr double theorem_eta() { return 53.0 / 36.0 - 1.374368541932633;  /* sqrt(17)/3 */ }

struct RunRecord {
    std::uint64_t trial = 0;
    std::string solver;
    std::uint64_t iter = 0;
    int stage = 1;
    std::uint64_t m_active = 0;
    double pred_error = 0.0;
    std::uint64_t cum_flops = 0;
    double wall_seconds = 0.0;
};

struct SolverState {
    Vector beta;
    Vector beta_prev;
    std::uint64_t t = 0;
    int stage = 1;
    std::size_t subproblem = 0;
    std::uint64_t flops = 0;
    double grad_norm = std::numeric_limits<double>::quiet_NaN();
};

struct SolveResult {
    Vector beta;
    std::vector<RunRecord> records;
    std::uint64_t flops_init = 0;
    std::uint64_t flops_stage1 = 0;
    std::uint64_t flops_stage2 = 0;
    std::uint64_t hessian_build_flops = 0;
    double init_seconds = 0.0;
    bool stopped = false;    // a stop rule fired in stage 2
    bool hit_t_max = false;  // warning: budget exhausted before the stop rule
    std::vector<int> a_used;
    double init_ratio = std::numeric_limits<double>::quiet_NaN();
    int theorem5_condition = -1;  // theorem4 mode: 1 held, 0 violated, -1 not measured
};

/// Materialized stage-1 subproblems (S_i X, S_i Y) plus the accounted
/// initialization cost.
struct Stage1Data {
    std::vector<Matrix> a;
    std::vector<Vector> b;
    std::vector<std::uint64_t> sizes;
    std::uint64_t sketch_flops = 0;
    double sketch_seconds = 0.0;
};

Stage1Data make_stage1_srht(const SketchedDataset& ds);
Stage1Data make_stage1_direct(const Matrix& x, const Vector& y,
                              const std::vector<std::uint64_t>& sizes, SketchKind kind, Rng& rng);

/// One momentum-preconditioned step against (A, b):
///   beta <- beta - mu H^{-1} A'(A beta - b) + eta (beta - beta_prev).
/// Adds exactly (4d+1) rows(A) + 2d^2 + 5d to the flop counter and leaves
/// ||A'(A beta_t - b)|| of the pre-step iterate in state.grad_norm. Throws
/// numeric_error reporting t and stage if the iterate leaves the finite range.
void mihs_step(SolverState& state, const HessianSketch& h, const Matrix& a, const Vector& b,
               double mu, double eta);

/// Two-stage run: a_i momentum steps against each nested subproblem with warm
/// starts, then full-scale steps until the stop rule fires or t_max.
SolveResult slse_frs_run(const LinearModel& model, const Stage1Data& stage1,
                         const HessianSketch& h, const SolverConfig& cfg, bool timing = true,
                         double init_seconds = 0.0);

/// Convenience wrapper that builds S_0, the views and an independent Hessian
/// sketch (seed stream "hessian") from the plan's seed.
SolveResult slse_frs_run(const LinearModel& model, const SketchPlan& plan,
                         const SolverConfig& cfg, bool timing = true);

/// Plain momentum iteration on the full problem (empty schedule).
SolveResult mihs_full_run(const LinearModel& model, const HessianSketch& h,
                          const SolverConfig& cfg, bool timing = true,
                          double init_seconds = 0.0);

/// Conjugate gradient on the normal equations X'X beta = X'Y preconditioned
/// by the Hessian sketch inverse.
SolveResult pcg_run(const LinearModel& model, const HessianSketch& h, const SolverConfig& cfg,
                    bool timing = true, double init_seconds = 0.0);

/// Resolved (mu, eta) for a given d and r under cfg.
std::pair<double, double> resolve_step_params(const SolverConfig& cfg, std::size_t d,
                                              std::size_t r);

}  // namespace slse
