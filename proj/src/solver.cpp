#include "slse/solver.hpp"

#include <chrono>
#include <cmath>

#include "slse/error.hpp"

namespace slse {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

constexpr double kDivergenceGuard = 1e12;

void check_iterate(const SolverState& state) {
    if (!all_finite(state.beta) || nrm2(state.beta) > kDivergenceGuard)
        throw numeric_error("momentum iteration diverged at t = " + std::to_string(state.t) +
                            ", stage " + std::to_string(state.stage));
}

std::vector<int> resolve_schedule(const LinearModel& model, const Stage1Data& stage1,
                                  const SolverConfig& cfg, SolveResult& result) {
    const std::size_t k = stage1.sizes.size();
    if (k == 0) return {};
    if (cfg.theorem4_schedule) {
        // a_1 from the measured initial-error ratio, a_i (i >= 2) from the
        // size-ratio bound. The exact subproblem-1 solve is a schedule probe,
        // kept out of the run counters.
        const Vector bt1 = householder_ls(stage1.a[0], stage1.b[0]);
        Vector diff(model.d);
        for (std::size_t j = 0; j < model.d; ++j) diff[j] = bt1[j] - model.beta_true[j];
        const double denom = nrm2(matvec(model.x, diff));
        for (std::size_t j = 0; j < model.d; ++j) diff[j] = 0.0 - bt1[j];
        const double numer = nrm2(matvec(model.x, diff));
        constexpr int kMaxDerivedCount = 64;
        std::vector<int> a(k, 1);
        if (denom > 0.0) {
            result.init_ratio = numer / denom;
            const double hi = 1.0 + (1.0 + cfg.omega) / std::sqrt(2.0);
            result.theorem5_condition = (result.init_ratio > 1.0 && result.init_ratio < hi) ? 1 : 0;
            a[0] = std::min(kMaxDerivedCount, a1_lower_bound(result.init_ratio, cfg.omega));
        } else {
            // Noiseless subproblem: the precision floor is zero and the bound
            // is unbounded; fall back to the capped maximum.
            result.init_ratio = std::numeric_limits<double>::infinity();
            result.theorem5_condition = 0;
            a[0] = kMaxDerivedCount;
        }
        for (std::size_t i = 2; i <= k; ++i)
            a[i - 1] = std::min(kMaxDerivedCount,
                                a_lower_bound(i, stage1.sizes, model.d, cfg.omega));
        return a;
    }
    std::vector<int> a = cfg.a;
    if (a.empty()) a.assign(k, 2);
    if (a.size() == 1) a.assign(k, a[0]);
    if (a.size() != k)
        throw config_error("solver: a-schedule length " + std::to_string(cfg.a.size()) +
                           " does not match the subproblem count " + std::to_string(k));
    for (int count : a)
        if (count < 1) throw config_error("solver: iteration counts must be positive");
    return a;
}

struct StopProbe {
    double xty_norm = 0.0;  // residual mode reference
};

bool stage2_stop(const SolverConfig& cfg, const SolverState& state, double delta,
                 const StopProbe& probe) {
    if (cfg.stop == StopMode::oracle) return delta <= cfg.stop_target;
    return state.grad_norm <= cfg.stop_tol * probe.xty_norm;
}

}  // namespace

std::pair<double, double> resolve_step_params(const SolverConfig& cfg, std::size_t d,
                                              std::size_t r) {
    double eta = cfg.eta;
    double mu = cfg.mu;
    if (cfg.theorem_params) {
        if (std::isnan(eta)) eta = theorem_eta();
        if (std::isnan(mu)) mu = 1.0;
        if (std::abs(mu - 1.0) > 0.25)
            throw config_error("solver: theorem parameters require |mu - 1| <= 1/4");
    } else {
        if (std::isnan(eta)) eta = static_cast<double>(d) / static_cast<double>(r);
        if (std::isnan(mu)) mu = (1.0 - eta) * (1.0 - eta);
    }
    return {mu, eta};
}

Stage1Data make_stage1_srht(const SketchedDataset& ds) {
    const auto t0 = Clock::now();
    Stage1Data out;
    out.sizes = ds.sizes;
    out.sketch_flops = ds.flops;
    for (std::size_t i = 0; i < ds.sizes.size(); ++i) {
        auto [a, b] = extract_view(ds, i);
        out.a.push_back(std::move(a));
        out.b.push_back(std::move(b));
    }
    out.sketch_seconds = seconds_since(t0);
    return out;
}

Stage1Data make_stage1_direct(const Matrix& x, const Vector& y,
                              const std::vector<std::uint64_t>& sizes, SketchKind kind, Rng& rng) {
    const auto t0 = Clock::now();
    Stage1Data out;
    out.sizes = sizes;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        const std::size_t m = static_cast<std::size_t>(sizes[i]);
        std::pair<Matrix, Vector> sk;
        switch (kind) {
            case SketchKind::srht:
                throw config_error("make_stage1_direct: use make_stage1_srht for SRHT");
            case SketchKind::countsketch:
                sk = countsketch_apply(m, x, y, rng);
                out.sketch_flops += 2ull * x.rows * (x.cols + 1);
                break;
            case SketchKind::gaussian:
                sk = gaussian_apply(m, x, y, rng);
                out.sketch_flops += 2ull * m * x.rows * (x.cols + 1);
                break;
            case SketchKind::identity:
                throw config_error("make_stage1_direct: identity sketch is a test stub only");
        }
        out.a.push_back(std::move(sk.first));
        out.b.push_back(std::move(sk.second));
    }
    out.sketch_seconds = seconds_since(t0);
    return out;
}

void mihs_step(SolverState& state, const HessianSketch& h, const Matrix& a, const Vector& b,
               double mu, double eta) {
    const std::size_t d = a.cols;
    if (state.beta.size() != d || b.size() != a.rows)
        throw dim_error("mihs_step: shapes do not conform");

    // gradient A'(A beta - b): (4d+1) m flops
    Vector residual = matvec(a, state.beta);
    for (std::size_t i = 0; i < residual.size(); ++i) residual[i] -= b[i];
    Vector grad = matvec_t(a, residual);
    state.grad_norm = nrm2(grad);
    state.flops += (4ull * d + 1ull) * a.rows;

    Vector w = apply_inv(h, grad, state.flops);  // +2d^2

    // beta update: 5d flops
    Vector next(d);
    for (std::size_t j = 0; j < d; ++j)
        next[j] = state.beta[j] - mu * w[j] + eta * (state.beta[j] - state.beta_prev[j]);
    state.flops += 5ull * d;

    state.beta_prev = std::move(state.beta);
    state.beta = std::move(next);
    state.t += 1;
    check_iterate(state);
}

namespace {

SolveResult run_two_stage(const LinearModel& model, const Stage1Data& stage1,
                          const HessianSketch& h, const SolverConfig& cfg, bool timing,
                          double init_seconds) {
    const std::size_t d = model.d;
    const auto [mu, eta] = resolve_step_params(cfg, d, h.r);

    SolveResult result;
    result.hessian_build_flops = h.flops_build;
    result.flops_init = stage1.sketch_flops;
    result.init_seconds = timing ? init_seconds + stage1.sketch_seconds : 0.0;
    result.a_used = resolve_schedule(model, stage1, cfg, result);

    StopProbe probe;
    if (cfg.stop == StopMode::residual) probe.xty_norm = nrm2(matvec_t(model.x, model.y));

    SolverState state;
    state.beta.assign(d, 0.0);
    state.beta_prev = state.beta;
    state.flops = result.flops_init;
    state.stage = stage1.sizes.empty() ? 2 : 1;

    double wall = result.init_seconds;
    auto push_record = [&](std::uint64_t m_active) {
        RunRecord rec;
        rec.iter = state.t;
        rec.stage = state.stage;
        rec.m_active = m_active;
        rec.pred_error = pred_error(model, state.beta);
        rec.cum_flops = state.flops;
        rec.wall_seconds = wall;
        result.records.push_back(std::move(rec));
        return result.records.back().pred_error;
    };

    push_record(0);  // iteration 0 baseline

    // 1st stage: a_i steps against each nested subproblem, warm-started and
    // with the momentum history reset on entry (beta_prev = beta).
    const std::uint64_t flops_before_stage1 = state.flops;
    for (std::size_t i = 0; i < stage1.sizes.size(); ++i) {
        state.subproblem = i + 1;
        state.beta_prev = state.beta;
        for (int j = 0; j < result.a_used[i]; ++j) {
            const auto t0 = Clock::now();
            mihs_step(state, h, stage1.a[i], stage1.b[i], mu, eta);
            if (timing) wall += seconds_since(t0);
            push_record(stage1.sizes[i]);
        }
    }
    result.flops_stage1 = state.flops - flops_before_stage1;

    // 2nd stage: full-scale steps until the stop rule fires or t_max.
    state.stage = 2;
    state.beta_prev = state.beta;
    const std::uint64_t flops_before_stage2 = state.flops;
    while (state.t < cfg.t_max) {
        const auto t0 = Clock::now();
        mihs_step(state, h, model.x, model.y, mu, eta);
        if (timing) wall += seconds_since(t0);
        const double delta = push_record(model.n);
        if (stage2_stop(cfg, state, delta, probe)) {
            result.stopped = true;
            break;
        }
    }
    result.flops_stage2 = state.flops - flops_before_stage2;
    result.hit_t_max = !result.stopped;
    result.beta = state.beta;
    return result;
}

}  // namespace

SolveResult slse_frs_run(const LinearModel& model, const Stage1Data& stage1,
                         const HessianSketch& h, const SolverConfig& cfg, bool timing,
                         double init_seconds) {
    if (!stage1.sizes.empty() && h.r >= stage1.sizes.front())
        throw config_error("slse_frs_run: the smallest sketch size m_1 = " +
                           std::to_string(stage1.sizes.front()) +
                           " must exceed the Hessian sketch size r = " + std::to_string(h.r));
    return run_two_stage(model, stage1, h, cfg, timing, init_seconds);
}

SolveResult slse_frs_run(const LinearModel& model, const SketchPlan& plan,
                         const SolverConfig& cfg, bool timing) {
    const auto t0 = Clock::now();
    const std::size_t r =
        static_cast<std::size_t>(std::llround(cfg.r_mult * static_cast<double>(model.d)));
    Rng hrng(Rng::derive(plan.seed, "hessian"));
    const SketchedDataset ds = apply_srht_full(plan, model.x, model.y);
    const HessianSketch h = build_hessian_sketch(model.x, r, hrng);
    const double setup_seconds = seconds_since(t0);
    Stage1Data stage1 = make_stage1_srht(ds);
    stage1.sketch_seconds = 0.0;  // already covered by setup_seconds
    return slse_frs_run(model, stage1, h, cfg, timing, setup_seconds);
}

SolveResult mihs_full_run(const LinearModel& model, const HessianSketch& h,
                          const SolverConfig& cfg, bool timing, double init_seconds) {
    const Stage1Data empty;
    return run_two_stage(model, empty, h, cfg, timing, init_seconds);
}

SolveResult pcg_run(const LinearModel& model, const HessianSketch& h, const SolverConfig& cfg,
                    bool timing, double init_seconds) {
    const std::size_t n = model.n, d = model.d;
    SolveResult result;
    result.hessian_build_flops = h.flops_build;
    result.init_seconds = timing ? init_seconds : 0.0;

    Vector beta(d, 0.0);
    Vector xty = matvec_t(model.x, model.y);
    const double xty_norm = nrm2(xty);

    std::uint64_t flops = 0;
    double wall = result.init_seconds;
    std::uint64_t iter = 0;

    auto push_record = [&](double delta) {
        RunRecord rec;
        rec.iter = iter;
        rec.stage = 2;
        rec.m_active = n;
        rec.pred_error = delta;
        rec.cum_flops = flops;
        rec.wall_seconds = wall;
        result.records.push_back(std::move(rec));
    };

    push_record(pred_error(model, beta));

    auto t0 = Clock::now();
    Vector residual = xty;  // X'X * 0 = 0
    Vector z = apply_inv(h, residual, flops);
    Vector p = z;
    double rho = dot(residual, z);
    if (timing) wall += seconds_since(t0);

    while (iter < cfg.t_max) {
        if (nrm2(residual) == 0.0) {  // already at the exact solution
            result.stopped = true;
            break;
        }
        t0 = Clock::now();
        Vector q = matvec_t(model.x, matvec(model.x, p));
        const double pq = dot(p, q);
        if (!(pq > 0.0))
            throw numeric_error("pcg: curvature breakdown at iteration " + std::to_string(iter));
        const double alpha = rho / pq;
        axpy(alpha, p, beta);
        axpy(-alpha, q, residual);
        z = apply_inv(h, residual, flops);
        const double rho_next = dot(residual, z);
        for (std::size_t j = 0; j < d; ++j) p[j] = z[j] + (rho_next / rho) * p[j];
        rho = rho_next;
        flops += (4ull * d + 1ull) * n + 10ull * d;
        if (timing) wall += seconds_since(t0);

        iter += 1;
        const double delta = pred_error(model, beta);
        push_record(delta);
        if (!all_finite(beta) || nrm2(beta) > kDivergenceGuard)
            throw numeric_error("pcg diverged at iteration " + std::to_string(iter));
        const bool hit = cfg.stop == StopMode::oracle ? delta <= cfg.stop_target
                                                      : nrm2(residual) <= cfg.stop_tol * xty_norm;
        if (hit) {
            result.stopped = true;
            break;
        }
    }
    result.hit_t_max = !result.stopped;
    result.flops_stage2 = flops;
    result.beta = std::move(beta);
    return result;
}

}  // namespace slse
