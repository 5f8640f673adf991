// Acceptance suite: one check per numbered criterion, each printed as a
// PASS/FAIL line with the measured quantities. The process exits with the
// number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "slse/bench.hpp"
#include "slse/error.hpp"

using namespace slse;

namespace {

using Clock = std::chrono::steady_clock;

int g_failures = 0;

void report(int id, const char* name, bool pass, const std::string& detail) {
    if (!pass) ++g_failures;
    std::printf("criterion %d %-4s %s: %s\n", id, pass ? "PASS" : "FAIL", name, detail.c_str());
}

void info(const std::string& line) { std::printf("    note: %s\n", line.c_str()); }

double elapsed(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* format, ...) {
    char buf[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof(buf), format, args);
    va_end(args);
    return buf;
}

// ---- criteria 1 and 2 share one paired experiment ------------------------

void criteria_1_and_2() {
    ExperimentConfig cfg;
    cfg.n = 1 << 14;
    cfg.d = 1 << 6;
    cfg.kappa = 1e4;
    cfg.sigma2 = 1e-8;
    cfg.trials = 10;
    cfg.solvers = {"slse-frs", "mihs", "pcg"};
    cfg.ai = "2";
    cfg.seed = 20240901;
    cfg.timing = true;

    const auto t0 = Clock::now();
    const ExperimentResult res = run_experiment(cfg);
    const double wall = elapsed(t0);

    const SolverSummary& slse = res.summaries[0];
    const SolverSummary& mihs = res.summaries[1];
    const SolverSummary& pcg = res.summaries[2];

    // criterion 1: final Delta_T <= 3 Delta_OLS in >= 9 of 10 trials, <= 60 s
    int ok_trials = 0;
    double worst_ratio = 0.0;
    for (std::size_t t = 0; t < cfg.trials; ++t) {
        const double ratio = slse.final_pred_error[t] / res.delta_ols[t];
        worst_ratio = std::max(worst_ratio, ratio);
        if (ratio <= 3.0) ++ok_trials;
    }
    report(1, "OLS-level precision", ok_trials >= 9 && wall <= 60.0,
           fmt("final Delta_T <= 3*Delta_OLS in %d/10 trials (worst ratio %.3f); "
               "experiment wall %.1f s (limit 60 s)",
               ok_trials, worst_ratio, wall));

    // criterion 2: paired flops-to-target orderings
    int slse_lt_mihs = 0, slse_lt_pcg = 0, ratio_ok = 0, comparable = 0;
    double ratio_sum = 0.0;
    for (std::size_t t = 0; t < cfg.trials; ++t) {
        const double fs = slse.flops_to_target[t];
        const double fm = mihs.flops_to_target[t];
        const double fp = pcg.flops_to_target[t];
        if (std::isnan(fs) || std::isnan(fm) || std::isnan(fp)) continue;
        ++comparable;
        if (fs < fm) ++slse_lt_mihs;
        if (fs < fp) ++slse_lt_pcg;
        const double ratio = fm / fs;
        ratio_sum += ratio;
        if (ratio >= 1.3) ++ratio_ok;
    }
    const bool pass2 = comparable == 10 && slse_lt_mihs == 10 && slse_lt_pcg == 10 && ratio_ok >= 8;
    report(2, "efficiency ordering", pass2,
           fmt("flops-to-target: slse<mihs in %d/10, slse<pcg in %d/10, "
               "mihs/slse ratio >= 1.3 in %d/10 (mean ratio %.2f)",
               slse_lt_mihs, slse_lt_pcg, ratio_ok, ratio_sum / std::max(1, comparable)));
    if (!pass2) {
        info("in FLOP terms the full-scale stage-2 steps dominate this problem size: one");
        info("full gradient costs (4d+1)N while the whole stage-1 schedule costs about two");
        info("such steps plus an Nd*log2(N) transform, so the cheap early iterations cannot");
        info("buy a 1.3x margin; the published 2-3x advantage is a wall-clock effect at");
        info("N >= 2^20 where full-data passes are memory-bound.");
        // Context: the same comparison with the bound-derived schedule.
        ExperimentConfig theo = cfg;
        theo.ai = "theorem4";
        theo.omega = 0.0625;
        theo.timing = false;
        const ExperimentResult tres = run_experiment(theo);
        double tsum = 0.0;
        int tcmp = 0, tok = 0;
        for (std::size_t t = 0; t < theo.trials; ++t) {
            const double fs = tres.summaries[0].flops_to_target[t];
            const double fm = tres.summaries[1].flops_to_target[t];
            if (std::isnan(fs) || std::isnan(fm)) continue;
            ++tcmp;
            tsum += fm / fs;
            if (fm / fs >= 1.3) ++tok;
        }
        info(fmt("with the derived iteration counts (ai=theorem4, omega=2^-4) the mean "
                 "mihs/slse flop ratio is %.2f and >=1.3 holds in %d/%d trials",
                 tsum / std::max(1, tcmp), tok, tcmp));
    }
}

void criterion_3() {
    const auto t0 = Clock::now();
    const double pe = estimate_pe(1 << 12, 1 << 6, 1 << 11, SketchKind::srht, 200, 77);
    const double wall = elapsed(t0);
    const double limit = 63.0 / 31.0;
    const double rel = std::abs(pe - limit) / limit;
    report(3, "PE limit", rel <= 0.15 && wall <= 120.0,
           fmt("estimate %.4f vs limit %.4f (deviation %.1f%%, tolerance 15%%); wall %.1f s "
               "(limit 120 s)",
               pe, limit, 100.0 * rel, wall));
}

void criterion_4() {
    // Pinned setting: theorem parameters on one subproblem, r = 6d, d = 2^5,
    // m = 2^10, N = 2^13; 20 seeds, 5-step burn-in.
    const std::size_t n = 1 << 13, d = 1 << 5, m = 1 << 10, r = 6 * d;
    std::vector<double> medians;
    for (int seed = 0; seed < 20; ++seed) {
        const LinearModel model = gen_model(n, d, 1e4, 1e-8, 9100 + seed);
        Rng srng(9200 + seed);
        const SketchPlan plan = build_srht_plan(n, {m}, srng);
        const SketchedDataset ds = apply_srht_full(plan, model.x, model.y);
        auto [a, b] = extract_view(ds, 0);
        Rng hrng(9300 + seed);
        const HessianSketch h = build_hessian_sketch(model.x, r, hrng);
        const Vector solution = householder_ls(a, b);

        SolverState state;
        state.beta.assign(d, 0.0);
        state.beta_prev = state.beta;
        std::vector<double> err;
        for (int t = 0; t <= 25; ++t) {
            if (t > 0) mihs_step(state, h, a, b, 1.0, theorem_eta());
            Vector diff(d);
            for (std::size_t j = 0; j < d; ++j) diff[j] = state.beta[j] - solution[j];
            err.push_back(nrm2(matvec(a, diff)));
        }
        std::vector<double> ratios;
        for (std::size_t t = 6; t < err.size(); ++t)
            ratios.push_back(err[t] / std::max(err[t - 1], 1e-300));
        medians.push_back(oracle::median(ratios));
    }
    const double med = oracle::median(medians);
    report(4, "contraction property", med <= 0.45,
           fmt("median per-step error ratio %.3f at r = 6d (threshold 0.45)", med));
    if (med > 0.45) {
        info("with mu = 1 the momentum recurrence is stable only while the preconditioned");
        info("spectrum stays within about [0.5, 2+2*eta]; that needs sketch distortion well");
        info("below 0.1, but an oblivious sketch of r = 6d rows has distortion near");
        info("2*sqrt(d/r) ~ 0.8, so at this r the iteration cannot contract.");
        // Demonstrate the same recurrence where its preconditions hold.
        std::vector<double> meds_valid;
        for (int seed = 0; seed < 5; ++seed) {
            const LinearModel model = gen_model(1 << 14, 8, 1e4, 1e-8, 9400 + seed);
            Rng srng(9500 + seed);
            const SketchPlan plan = build_srht_plan(model.n, {1ull << 13}, srng);
            const SketchedDataset ds = apply_srht_full(plan, model.x, model.y);
            auto [a, b] = extract_view(ds, 0);
            Rng hrng(9600 + seed);
            const HessianSketch h = build_hessian_sketch(model.x, 1 << 12, hrng);
            const Vector solution = householder_ls(a, b);
            SolverState state;
            state.beta.assign(model.d, 0.0);
            state.beta_prev = state.beta;
            std::vector<double> err;
            for (int t = 0; t <= 25; ++t) {
                if (t > 0) mihs_step(state, h, a, b, 1.0, theorem_eta());
                Vector diff(model.d);
                for (std::size_t j = 0; j < model.d; ++j) diff[j] = state.beta[j] - solution[j];
                err.push_back(nrm2(matvec(a, diff)));
            }
            std::vector<double> ratios;
            for (std::size_t t = 6; t < err.size(); ++t)
                ratios.push_back(err[t] / std::max(err[t - 1], 1e-300));
            meds_valid.push_back(oracle::median(ratios));
        }
        info(fmt("at a distortion-valid sketch size (d=8, r=2^12, N=2^14) the same recurrence "
                 "contracts with median per-step ratio %.3f ~ sqrt(eta) = %.3f",
                 oracle::median(meds_valid), std::sqrt(theorem_eta())));
    }
}

void criterion_5() {
    Rng rng(501);
    double worst = 0.0;
    for (std::size_t n = 2; n <= 1024; n <<= 1) {
        const Matrix h = oracle::dense_hadamard(n);
        const Vector x = oracle::random_vector(n, rng);
        const Vector ref = matvec(h, x);
        const Vector got = fwht_normalized(x);
        worst = std::max(worst, oracle::max_abs_diff(got, ref) / (1.0 + nrm2(ref)));
    }
    double worst_norm_drift = 0.0;
    for (int rep = 0; rep < 10000; ++rep) {
        const std::size_t n = std::size_t{1} << (1 + rep % 10);
        Vector x = oracle::random_vector(n, rng);
        const double before = nrm2(x);
        fwht_inplace(x);
        worst_norm_drift = std::max(worst_norm_drift, std::abs(nrm2(x) - before) / before);
    }
    report(5, "FWHT oracle equivalence", worst <= 1e-12 && worst_norm_drift <= 1e-12,
           fmt("max relative deviation from the dense transform %.2e over lengths 2..2^10; "
               "max norm drift %.2e over 10^4 vectors",
               worst, worst_norm_drift));
}

void criterion_6() {
    bool all_exact = true;
    std::string detail;
    for (const std::size_t d : {2, 8, 32}) {
        for (const std::size_t mult : {16, 32, 64}) {
            const std::size_t m1 = mult * d;
            const std::size_t n = 8 * m1;  // power of two since d, mult are
            const std::vector<std::uint64_t> sizes{m1, 2 * m1};
            const std::size_t t2 = 4;

            const LinearModel model = gen_model(n, d, 100.0, 1e-8, 600 + d + mult);
            Rng srng(700 + d + mult);
            const SketchPlan plan = build_srht_plan(n, sizes, srng);
            const Stage1Data stage1 = make_stage1_srht(apply_srht_full(plan, model.x, model.y));
            Rng hrng(800 + d + mult);
            const HessianSketch h = build_hessian_sketch(model.x, 4 * d, hrng);
            SolverConfig cfg;
            cfg.a = {2};
            cfg.t_max = 2 * sizes.size() + t2;
            cfg.stop_target = 0.0;
            const SolveResult res = slse_frs_run(model, stage1, h, cfg, false);
            const FlopBudget budget =
                flop_budget(n, n, d, sizes, std::vector<int>(sizes.size(), 2), t2);
            const bool exact = res.flops_init == budget.init &&
                               res.flops_stage1 == budget.stage1 &&
                               res.flops_stage2 == budget.stage2 &&
                               res.records.back().cum_flops == budget.total();
            if (!exact) {
                all_exact = false;
                detail += fmt(" mismatch at d=%zu m1=%zu;", d, m1);
            }
        }
    }
    report(6, "FLOP accounting exactness", all_exact,
           all_exact ? "runtime counters equal the closed-form budgets on the 3x3 grid "
                       "(integer equality)"
                     : detail);
}

void criterion_7() {
    bool pass = true;
    std::string detail;

    // hand-evaluated values
    const std::vector<std::uint64_t> degenerate{1u << 20, 1u << 20};
    if (a_lower_bound(2, degenerate, 1, 0.5) != 2) pass = false;
    const std::vector<std::uint64_t> doubling{1u << 20, 1u << 21};
    if (a_lower_bound(2, doubling, 1, 0.0625) != 4) pass = false;
    if (a1_lower_bound(1.0, 1.0) != 1 || a1_lower_bound(27.0, 1.0) != 3 ||
        a1_lower_bound(2.4, 0.0625) != 4)
        pass = false;

    // monotonicity for default schedules up to K = 8
    for (std::size_t k = 1; k <= 8 && pass; ++k) {
        const std::size_t d = 8;
        const auto sizes = default_sizes((8 * d) << k, d);
        for (const double omega : {0.0625, 0.125, 0.25, 0.5, 0.9375}) {
            int prev = 0;
            for (std::size_t i = 2; i <= sizes.size(); ++i) {
                const int bound = a_lower_bound(i, sizes, d, omega);
                if (i > 2 && bound < prev) pass = false;
                prev = bound;
            }
        }
    }

    // omega sweep: nonincreasing in omega, max 3-4 at omega = 2^-4
    const auto sweep_sizes = default_sizes(std::size_t{1} << 20, 64);
    int prev_max = 1 << 30, max_at_small_omega = 0;
    for (const double omega : {0.0625, 0.125, 0.25, 0.5, 0.9375}) {
        int max_bound = 0;
        for (std::size_t i = 2; i <= sweep_sizes.size(); ++i)
            max_bound = std::max(max_bound, a_lower_bound(i, sweep_sizes, 64, omega));
        if (max_bound > prev_max) pass = false;
        prev_max = max_bound;
        if (omega == 0.0625) max_at_small_omega = max_bound;
    }
    if (max_at_small_omega < 3 || max_at_small_omega > 4) pass = false;

    report(7, "schedule bounds", pass,
           fmt("hand values exact; bounds nondecreasing in i for K <= 8; omega sweep "
               "nonincreasing with max %d at omega = 2^-4",
               max_at_small_omega));
}

void criterion_8() {
    const std::size_t n = 1 << 12, d = 16, m = 6 * d;
    Rng urng(801);
    const Matrix u = qr_thin(oracle::random_matrix(n, d, urng)).q;
    const Vector zero(n, 0.0);

    std::vector<double> eps_srht, eps_cs;
    for (int seed = 0; seed < 50; ++seed) {
        Rng rng(8100 + seed);
        const SketchPlan plan = build_srht_plan(n, {m}, rng);
        const SketchedDataset ds = apply_srht_full(plan, u, zero);
        eps_srht.push_back(embedding_epsilon(u, extract_view(ds, 0).first));
        Rng crng(8200 + seed);
        eps_cs.push_back(embedding_epsilon(u, countsketch_apply(m, u, zero, crng).first));
    }
    const double med_srht = oracle::median(eps_srht);
    const double med_cs = oracle::median(eps_cs);
    const bool pass = med_srht <= 0.5 && med_cs >= med_srht;
    report(8, "embedding quality", pass,
           fmt("SRHT median eps %.3f (threshold 0.5); CountSketch median eps %.3f "
               "(ordering CS >= SRHT %s)",
               med_srht, med_cs, med_cs >= med_srht ? "holds" : "violated"));
    if (med_srht > 0.5) {
        info("an oblivious subspace embedding with m = 6d rows concentrates no better than");
        info("about 2*sqrt(d/m) + d/m ~ 0.85, so a median of 0.5 is out of reach at this m;");
        info(fmt("quadrupling the sketch (m = 24d) brings the measured median to %.3f.", [&] {
                 std::vector<double> eps24;
                 for (int seed = 0; seed < 20; ++seed) {
                     Rng rng(8300 + seed);
                     const SketchPlan plan = build_srht_plan(n, {24 * d}, rng);
                     const SketchedDataset ds = apply_srht_full(plan, u, zero);
                     eps24.push_back(embedding_epsilon(u, extract_view(ds, 0).first));
                 }
                 return oracle::median(eps24);
             }()));
    }
}

void criterion_9() {
    ExperimentConfig cfg;
    cfg.n = 1 << 10;
    cfg.d = 1 << 4;
    cfg.trials = 2;
    cfg.solvers = {"slse-frs", "pcg"};
    cfg.seed = 99;
    cfg.timing = false;  // wall clock excluded from the byte comparison

    const ExperimentResult a = run_experiment(cfg);
    const ExperimentResult b = run_experiment(cfg);
    const std::string csv_a = records_csv(a.records);
    const std::string csv_b = records_csv(b.records);
    const bool bytes_equal = csv_a == csv_b;

    // Under real timing every non-wall column must still match.
    cfg.timing = true;
    const ExperimentResult c = run_experiment(cfg);
    bool computed_equal = c.records.size() == a.records.size();
    for (std::size_t i = 0; computed_equal && i < c.records.size(); ++i)
        computed_equal = c.records[i].pred_error == a.records[i].pred_error &&
                         c.records[i].cum_flops == a.records[i].cum_flops;

    report(9, "determinism", bytes_equal && computed_equal,
           fmt("byte-identical CSV across two runs (%zu bytes); computed columns identical "
               "under real timing",
               csv_a.size()));
}

}  // namespace

int main() {
    std::printf("acceptance suite\n");
    try {
        criteria_1_and_2();
        criterion_3();
        criterion_4();
        criterion_5();
        criterion_6();
        criterion_7();
        criterion_8();
        criterion_9();
    } catch (const std::exception& e) {
        std::printf("acceptance: aborted by exception: %s\n", e.what());
        return 99;
    }
    std::printf("acceptance: %d criterion(s) failed\n", g_failures);
    return g_failures;
}
