#include "slse/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "slse/error.hpp"

namespace slse {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<std::string> split_csv_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ',')) {
        // trim
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b == std::string::npos) continue;
        out.push_back(item.substr(b, e - b + 1));
    }
    return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const unsigned long long v = std::stoull(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw config_error("config: key '" + key + "' expects an unsigned integer, got '" +
                           value + "'");
    }
}

double parse_f64(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw config_error("config: key '" + key + "' expects a number, got '" + value + "'");
    }
}

// Runs fn(0..count) on a small worker pool; rethrows the first failure.
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& fn) {
    if (threads == 0) threads = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    threads = std::min(threads, count);
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t w = 0; w < threads; ++w) {
        pool.emplace_back([&] {
            while (!failed.load(std::memory_order_relaxed)) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) break;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                    failed.store(true);
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace

const char* sketch_kind_name(SketchKind kind) {
    switch (kind) {
        case SketchKind::srht: return "srht";
        case SketchKind::countsketch: return "countsketch";
        case SketchKind::gaussian: return "gaussian";
        case SketchKind::identity: return "identity";
    }
    return "?";
}

SketchKind sketch_kind_from_name(const std::string& name) {
    if (name == "srht") return SketchKind::srht;
    if (name == "countsketch") return SketchKind::countsketch;
    if (name == "gaussian") return SketchKind::gaussian;
    if (name == "identity") return SketchKind::identity;
    throw config_error("config: unknown sketch kind '" + name +
                       "' (expected srht, countsketch or gaussian)");
}

void config_set(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "n") cfg.n = parse_u64(key, value);
    else if (key == "d") cfg.d = parse_u64(key, value);
    else if (key == "cond") cfg.kappa = parse_f64(key, value);
    else if (key == "sigma2") cfg.sigma2 = parse_f64(key, value);
    else if (key == "seed") cfg.seed = parse_u64(key, value);
    else if (key == "trials") cfg.trials = parse_u64(key, value);
    else if (key == "solvers") cfg.solvers = split_csv_list(value);
    else if (key == "sketch") cfg.sketch = sketch_kind_from_name(value);
    else if (key == "omega") cfg.omega = parse_f64(key, value);
    else if (key == "ai") cfg.ai = value;
    else if (key == "r-mult") cfg.r_mult = parse_f64(key, value);
    else if (key == "m1-mult") cfg.m1_mult = parse_u64(key, value);
    else if (key == "sizes") {
        cfg.sizes.clear();
        for (const auto& item : split_csv_list(value)) cfg.sizes.push_back(parse_u64(key, item));
    } else if (key == "t-max") cfg.t_max = parse_u64(key, value);
    else if (key == "stop") {
        if (value == "oracle") cfg.stop = StopMode::oracle;
        else if (value == "residual") cfg.stop = StopMode::residual;
        else throw config_error("config: stop must be 'oracle' or 'residual'");
    } else if (key == "tol") cfg.tol = parse_f64(key, value);
    else if (key == "target-factor") cfg.target_factor = parse_f64(key, value);
    else if (key == "mu") cfg.mu = parse_f64(key, value);
    else if (key == "eta") cfg.eta = parse_f64(key, value);
    else if (key == "timing") {
        if (value == "real") cfg.timing = true;
        else if (value == "none") cfg.timing = false;
        else throw config_error("config: timing must be 'real' or 'none'");
    } else if (key == "threads") cfg.threads = parse_u64(key, value);
    else if (key == "mem-cap-mb") cfg.mem_cap_mb = parse_u64(key, value);
    else if (key == "pe-m" || key == "m") cfg.pe_m = parse_u64(key, value);
    else if (key == "out-csv") cfg.out_csv = value;
    else if (key == "out-json") cfg.out_json = value;
    else if (key == "out-svg") cfg.out_svg = value;
    else throw config_error("config: unknown key '" + key + "'");
}

void config_load_file(ExperimentConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("config: cannot open " + path);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto b = line.find_first_not_of(" \t\r\n");
        if (b == std::string::npos) continue;
        const auto e = line.find_last_not_of(" \t\r\n");
        line = line.substr(b, e - b + 1);
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error("config: " + path + ":" + std::to_string(lineno) +
                               ": expected key=value");
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        const auto ke = key.find_last_not_of(" \t");
        key = key.substr(0, ke + 1);
        const auto vb = value.find_first_not_of(" \t");
        value = vb == std::string::npos ? "" : value.substr(vb);
        config_set(cfg, key, value);
    }
}

namespace {

struct ResolvedPlan {
    std::vector<std::uint64_t> sizes;
    std::size_t r = 0;
    std::vector<int> a;       // empty in theorem4 mode
    bool theorem4 = false;
};

ResolvedPlan validate_config(const ExperimentConfig& cfg) {
    if (cfg.d < 1 || cfg.n < cfg.d)
        throw config_error("config: need n >= d >= 1, got n=" + std::to_string(cfg.n) +
                           " d=" + std::to_string(cfg.d));
    if (cfg.kappa < 1.0) throw config_error("config: cond must be >= 1");
    if (cfg.sigma2 < 0.0) throw config_error("config: sigma2 must be >= 0");
    if (cfg.trials < 1) throw config_error("config: trials must be >= 1");
    if (cfg.t_max < 1) throw config_error("config: t-max must be >= 1");
    if (!(cfg.target_factor > 0.0)) throw config_error("config: target-factor must be positive");
    const double bytes = static_cast<double>(cfg.n) * static_cast<double>(cfg.d) * 8.0;
    if (bytes > static_cast<double>(cfg.mem_cap_mb) * 1024.0 * 1024.0)
        throw config_error("config: model of " + std::to_string(bytes / 1048576.0) +
                           " MB exceeds mem-cap-mb = " + std::to_string(cfg.mem_cap_mb));
    if (cfg.solvers.empty()) throw config_error("config: no solvers selected");
    for (const auto& s : cfg.solvers)
        if (s != "slse-frs" && s != "mihs" && s != "pcg")
            throw config_error("config: unknown solver '" + s +
                               "' (expected slse-frs, mihs or pcg)");
    if (cfg.sketch == SketchKind::identity)
        throw config_error("config: the identity sketch is a test stub, not a run option");

    ResolvedPlan plan;
    plan.r = static_cast<std::size_t>(std::llround(cfg.r_mult * static_cast<double>(cfg.d)));
    if (plan.r < cfg.d) throw config_error("config: r-mult gives r < d");

    const bool needs_stage1 =
        std::find(cfg.solvers.begin(), cfg.solvers.end(), "slse-frs") != cfg.solvers.end();
    if (needs_stage1) {
        const std::size_t np = next_pow2(cfg.n);
        if (cfg.sizes.empty()) {
            plan.sizes = default_sizes(np, cfg.d, cfg.m1_mult);
        } else {
            plan.sizes = cfg.sizes;
            for (std::size_t i = 0; i < plan.sizes.size(); ++i) {
                if (i > 0 && plan.sizes[i] <= plan.sizes[i - 1])
                    throw config_error("config: sizes must be strictly increasing");
                if (plan.sizes[i] > np)
                    throw config_error("config: size " + std::to_string(plan.sizes[i]) +
                                       " exceeds padded length " + std::to_string(np));
            }
        }
        if (plan.sizes.front() <= plan.r)
            throw config_error("config: infeasible schedule, m_1 = " +
                               std::to_string(plan.sizes.front()) +
                               " must exceed the Hessian sketch size r = " + std::to_string(plan.r));

        if (cfg.ai == "theorem4") {
            plan.theorem4 = true;
            if (!(cfg.omega > 0.0 && cfg.omega < 1.0))
                throw config_error("config: theorem4 schedule needs omega in (0, 1)");
        } else {
            for (const auto& item : split_csv_list(cfg.ai))
                plan.a.push_back(static_cast<int>(parse_u64("ai", item)));
            if (plan.a.empty()) throw config_error("config: ai must not be empty");
            if (plan.a.size() != 1 && plan.a.size() != plan.sizes.size())
                throw config_error("config: ai list length " + std::to_string(plan.a.size()) +
                                   " does not match the subproblem count " +
                                   std::to_string(plan.sizes.size()));
        }
    }
    return plan;
}

struct TrialOutput {
    std::vector<std::vector<RunRecord>> per_solver_records;
    std::vector<SolveResult> per_solver_results;
    double delta_ols = 0.0;
    double target = 0.0;
};

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    const ResolvedPlan plan = validate_config(cfg);

    ExperimentResult result;
    result.cfg = cfg;
    result.delta_ols.resize(cfg.trials);
    result.target.resize(cfg.trials);

    std::vector<TrialOutput> outputs(cfg.trials);

    parallel_for(cfg.trials, cfg.threads, [&](std::size_t trial) {
        TrialOutput& out = outputs[trial];
        const std::uint64_t trial_seed = Rng::derive(cfg.seed, "trial", trial);

        const LinearModel model =
            gen_model(cfg.n, cfg.d, cfg.kappa, cfg.sigma2, Rng::derive(trial_seed, "model"));
        out.delta_ols = pred_error(model, ols_solve(model));
        out.target = cfg.target_factor * out.delta_ols;

        SolverConfig scfg;
        scfg.mu = cfg.mu;
        scfg.eta = cfg.eta;
        scfg.r_mult = cfg.r_mult;
        scfg.a = plan.a;
        scfg.theorem4_schedule = plan.theorem4;
        scfg.omega = cfg.omega;
        scfg.t_max = cfg.t_max;
        scfg.stop = cfg.stop;
        scfg.stop_target = out.target;
        scfg.stop_tol = cfg.tol;

        // Shared preconditioner: one Hessian sketch per trial, every solver
        // sees the same factor.
        const auto h_start = Clock::now();
        Rng hrng(Rng::derive(trial_seed, "hessian"));
        const HessianSketch hessian = build_hessian_sketch(model.x, plan.r, hrng, cfg.sketch);
        const double hessian_seconds = cfg.timing ? seconds_since(h_start) : 0.0;

        for (const auto& solver : cfg.solvers) {
            SolveResult res;
            if (solver == "slse-frs") {
                const auto s_start = Clock::now();
                Stage1Data stage1;
                if (cfg.sketch == SketchKind::srht) {
                    Rng srng(Rng::derive(trial_seed, "sketch"));
                    const SketchPlan splan = build_srht_plan(cfg.n, plan.sizes, srng);
                    const SketchedDataset ds = apply_srht_full(splan, model.x, model.y);
                    stage1 = make_stage1_srht(ds);
                } else {
                    Rng srng(Rng::derive(trial_seed, "sketch"));
                    stage1 = make_stage1_direct(model.x, model.y, plan.sizes, cfg.sketch, srng);
                }
                stage1.sketch_seconds = cfg.timing ? seconds_since(s_start) : 0.0;
                res = slse_frs_run(model, stage1, hessian, scfg, cfg.timing, hessian_seconds);
            } else if (solver == "mihs") {
                res = mihs_full_run(model, hessian, scfg, cfg.timing, hessian_seconds);
            } else {
                res = pcg_run(model, hessian, scfg, cfg.timing, hessian_seconds);
            }
            for (auto& rec : res.records) {
                rec.trial = trial;
                rec.solver = solver;
            }
            out.per_solver_records.push_back(res.records);
            res.records.clear();
            out.per_solver_results.push_back(std::move(res));
        }
    });

    // Deterministic gather: (trial, solver position, iter).
    result.summaries.resize(cfg.solvers.size());
    for (std::size_t s = 0; s < cfg.solvers.size(); ++s) result.summaries[s].solver = cfg.solvers[s];

    for (std::size_t trial = 0; trial < cfg.trials; ++trial) {
        const TrialOutput& out = outputs[trial];
        result.delta_ols[trial] = out.delta_ols;
        result.target[trial] = out.target;
        for (std::size_t s = 0; s < cfg.solvers.size(); ++s) {
            const auto& recs = out.per_solver_records[s];
            result.records.insert(result.records.end(), recs.begin(), recs.end());
            const SolveResult& res = out.per_solver_results[s];
            SolverSummary& sum = result.summaries[s];

            double ftt = std::numeric_limits<double>::quiet_NaN();
            double ttt = std::numeric_limits<double>::quiet_NaN();
            int reached = 0;
            for (const auto& rec : recs) {
                if (rec.pred_error <= out.target) {
                    ftt = static_cast<double>(rec.cum_flops);
                    ttt = rec.wall_seconds;
                    reached = 1;
                    break;
                }
            }
            sum.final_pred_error.push_back(recs.back().pred_error);
            sum.flops_to_target.push_back(ftt);
            sum.time_to_target.push_back(ttt);
            sum.total_flops.push_back(static_cast<double>(recs.back().cum_flops));
            sum.init_flops.push_back(static_cast<double>(res.flops_init));
            sum.hessian_build_flops.push_back(static_cast<double>(res.hessian_build_flops));
            sum.init_seconds.push_back(res.init_seconds);
            sum.total_seconds.push_back(recs.back().wall_seconds);
            sum.iterations.push_back(recs.back().iter);
            sum.reached.push_back(reached);
            sum.a_used.push_back(res.a_used);
            sum.init_ratio.push_back(res.init_ratio);
            sum.theorem5_condition.push_back(res.theorem5_condition);
        }
    }

    for (auto& sum : result.summaries) {
        auto mean_of = [](const std::vector<double>& v) {
            double s = 0.0;
            std::size_t k = 0;
            for (double x : v)
                if (!std::isnan(x)) {
                    s += x;
                    ++k;
                }
            return k ? s / static_cast<double>(k) : std::numeric_limits<double>::quiet_NaN();
        };
        sum.mean_final_pred_error = mean_of(sum.final_pred_error);
        sum.mean_flops_to_target = mean_of(sum.flops_to_target);
        sum.mean_time_to_target = mean_of(sum.time_to_target);
        sum.mean_total_flops = mean_of(sum.total_flops);
        sum.mean_init_seconds = mean_of(sum.init_seconds);
        sum.mean_total_seconds = mean_of(sum.total_seconds);
        sum.reached_count = static_cast<std::size_t>(
            std::count(sum.reached.begin(), sum.reached.end(), 1));
    }

    if (!cfg.out_csv.empty() || !cfg.out_json.empty() || !cfg.out_svg.empty())
        emit_outputs(result, cfg.out_csv, cfg.out_json, cfg.out_svg);
    return result;
}

double estimate_pe(std::size_t n, std::size_t d, std::size_t m, SketchKind kind,
                   std::size_t trials, std::uint64_t seed, double kappa, std::size_t threads) {
    if (kind == SketchKind::identity) {
        if (m != n) throw config_error("estimate_pe: identity sketch requires m == n");
    } else if (!(d < m && m <= n)) {
        throw config_error("estimate_pe: need d < m <= n");
    }
    if (trials < 1) throw config_error("estimate_pe: trials must be >= 1");

    LinearModel model = gen_model(n, d, kappa, 1.0, Rng::derive(seed, "pe-model"));
    const QrFactors qf = qr_thin(model.x);

    std::vector<double> numer(trials), denom(trials);
    parallel_for(trials, threads, [&](std::size_t t) {
        const std::uint64_t ts = Rng::derive(seed, "pe-trial", t);

        // Fresh noise on the fixed design.
        Vector y = matvec(model.x, model.beta_true);
        {
            Rng noise(Rng::derive(ts, "noise"));
            for (auto& v : y) v += noise.normal();
        }

        // Exact OLS through the cached factorization.
        Vector bhat = tri_upper_solve(qf.r, matvec_t(qf.q, y));
        Vector diff(d);
        for (std::size_t j = 0; j < d; ++j) diff[j] = bhat[j] - model.beta_true[j];
        Vector xd = matvec(model.x, diff);
        denom[t] = dot(xd, xd);

        // Exact sketched LS.
        Rng srng(Rng::derive(ts, "sketch"));
        Vector btilde;
        if (kind == SketchKind::identity) {
            btilde = householder_ls(model.x, y);
        } else if (kind == SketchKind::srht) {
            const SketchPlan plan = build_srht_plan(n, {m}, srng);
            const SketchedDataset ds = apply_srht_full(plan, model.x, y);
            auto [sa, sb] = extract_view(ds, 0);
            btilde = householder_ls(std::move(sa), std::move(sb));
        } else if (kind == SketchKind::countsketch) {
            auto [sa, sb] = countsketch_apply(m, model.x, y, srng);
            btilde = householder_ls(std::move(sa), std::move(sb));
        } else {
            auto [sa, sb] = gaussian_apply(m, model.x, y, srng);
            btilde = householder_ls(std::move(sa), std::move(sb));
        }
        for (std::size_t j = 0; j < d; ++j) diff[j] = btilde[j] - model.beta_true[j];
        xd = matvec(model.x, diff);
        numer[t] = dot(xd, xd);
    });

    double num = 0.0, den = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
        num += numer[t];
        den += denom[t];
    }
    return num / den;
}

}  // namespace slse
