// Benchmark CLI over the slsefrs C API.
//
//   slse_bench run  --n 16384 --d 64 --cond 1e4 --solvers slse-frs,mihs,pcg ...
//   slse_bench pe   --n 4096 --d 64 --m 2048 --trials 200
//   slse_bench selfcheck
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "slsefrs.h"

namespace {

int exit_code_for(int status) {
    switch (status) {
        case SLSE_OK: return 0;
        case SLSE_ERR_CONFIG: return 2;
        case SLSE_ERR_NUMERIC: return 3;
        default: return 1;
    }
}

struct ConfigGuard {
    slse_config* cfg = nullptr;
    ~ConfigGuard() { slse_config_free(cfg); }
};

struct ResultGuard {
    slse_result* result = nullptr;
    ~ResultGuard() { slse_result_free(result); }
};

// Flag table: CLI name -> config key. Values are kept as strings and handed
// to slse_config_set, so CLI, config file and C API share one parser.
struct KeyFlag {
    const char* flag;
    const char* key;
    const char* help;
};

constexpr KeyFlag kRunFlags[] = {
    {"--n", "n", "sample size N"},
    {"--d", "d", "feature size d"},
    {"--cond", "cond", "condition number of X"},
    {"--sigma2", "sigma2", "noise variance"},
    {"--seed", "seed", "master seed"},
    {"--trials", "trials", "independent trials (default 10)"},
    {"--solvers", "solvers", "comma list: slse-frs,mihs,pcg"},
    {"--sketch", "sketch", "srht | countsketch | gaussian"},
    {"--omega", "omega", "subproblem precision parameter in (0,1)"},
    {"--ai", "ai", "iteration counts: k, k1,...,kK, or theorem4"},
    {"--r-mult", "r-mult", "Hessian sketch size r = r-mult * d (default 6)"},
    {"--m1-mult", "m1-mult", "smallest sketch size m1 = m1-mult * d (default 8)"},
    {"--sizes", "sizes", "explicit sketch-size list (overrides the doubling rule)"},
    {"--t-max", "t-max", "iteration budget (default 100)"},
    {"--stop", "stop", "oracle | residual"},
    {"--tol", "tol", "residual stop tolerance"},
    {"--out-csv", "out-csv", "per-iteration records CSV path"},
    {"--out-json", "out-json", "summary JSON path"},
    {"--out-svg", "out-svg", "convergence plot SVG path"},
};

int apply_flags(slse_config* cfg, const std::vector<std::pair<std::string, std::string>>& kv) {
    for (const auto& [key, value] : kv) {
        const int rc = slse_config_set(cfg, key.c_str(), value.c_str());
        if (rc != SLSE_OK) {
            std::fprintf(stderr, "error: %s\n", slse_last_error());
            return rc;
        }
    }
    return SLSE_OK;
}

void print_run_summary(const slse_result* result) {
    char* json_text = nullptr;
    if (slse_result_summary_json(result, &json_text) != SLSE_OK) return;
    const nlohmann::json j = nlohmann::json::parse(json_text);
    slse_string_free(json_text);

    double mean_ols = 0.0;
    for (const auto& v : j["per_trial"]["delta_ols"]) mean_ols += v.get<double>();
    mean_ols /= std::max<std::size_t>(1, j["per_trial"]["delta_ols"].size());
    std::printf("trials: %zu   mean Delta_OLS: %.6e   target factor: %g\n",
                static_cast<std::size_t>(j["config"]["trials"].get<std::uint64_t>()), mean_ols,
                j["config"]["target_factor"].get<double>());
    std::printf("%-10s %14s %16s %14s %12s %12s %10s\n", "solver", "final Delta",
                "flops-to-target", "time-to-tgt", "init-time", "total-time", "reached");
    for (const auto& s : j["solvers"]) {
        const auto name = s["solver"].get<std::string>();
        const double final_err = s["mean_final_pred_error"].get<double>();
        const std::string ftt =
            s["mean_flops_to_target"].is_null()
                ? std::string("-")
                : std::to_string(static_cast<long long>(s["mean_flops_to_target"].get<double>()));
        char ttt[32];
        if (s["mean_time_to_target"].is_null())
            std::snprintf(ttt, sizeof(ttt), "-");
        else
            std::snprintf(ttt, sizeof(ttt), "%.4fs", s["mean_time_to_target"].get<double>());
        std::printf("%-10s %14.6e %16s %14s %11.4fs %11.4fs %7zu/%zu\n", name.c_str(), final_err,
                    ftt.c_str(), ttt, s["mean_init_seconds"].get<double>(),
                    s["mean_total_seconds"].get<double>(),
                    static_cast<std::size_t>(s["reached_count"].get<std::uint64_t>()),
                    static_cast<std::size_t>(j["config"]["trials"].get<std::uint64_t>()));
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Randomized least-squares solver benchmark"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::pair<std::string, std::string>> run_kv, pe_kv;

    CLI::App* run = app.add_subcommand("run", "run a solver comparison experiment");
    run->add_option("--config", config_path, "config file (key=value lines, '#' comments)");
    std::vector<std::string> run_values(std::size(kRunFlags));
    for (std::size_t i = 0; i < std::size(kRunFlags); ++i)
        run->add_option(kRunFlags[i].flag, run_values[i], kRunFlags[i].help);

    CLI::App* pe = app.add_subcommand("pe", "estimate the relative prediction efficiency");
    std::string pe_n, pe_d, pe_m, pe_sketch, pe_trials, pe_seed, pe_cond;
    pe->add_option("--n", pe_n, "sample size N");
    pe->add_option("--d", pe_d, "feature size d");
    pe->add_option("--m", pe_m, "sketch size m (d < m <= N)")->required();
    pe->add_option("--sketch", pe_sketch, "srht | countsketch | gaussian");
    pe->add_option("--trials", pe_trials, "Monte-Carlo trials (default 10)");
    pe->add_option("--seed", pe_seed, "seed");
    pe->add_option("--cond", pe_cond, "condition number of X");

    CLI::App* selfcheck = app.add_subcommand("selfcheck", "run internal consistency checks");
    bool quiet = false;
    selfcheck->add_flag("--quiet", quiet, "suppress per-check output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    ConfigGuard guard;
    if (int rc = slse_config_create(&guard.cfg); rc != SLSE_OK) {
        std::fprintf(stderr, "error: %s\n", slse_last_error());
        return exit_code_for(rc);
    }

    if (run->parsed()) {
        if (!config_path.empty()) {
            if (int rc = slse_config_load_file(guard.cfg, config_path.c_str()); rc != SLSE_OK) {
                std::fprintf(stderr, "error: %s\n", slse_last_error());
                return exit_code_for(rc);
            }
        }
        for (std::size_t i = 0; i < std::size(kRunFlags); ++i)
            if (run->count(kRunFlags[i].flag)) run_kv.emplace_back(kRunFlags[i].key, run_values[i]);
        if (int rc = apply_flags(guard.cfg, run_kv); rc != SLSE_OK) return exit_code_for(rc);

        ResultGuard res;
        if (int rc = slse_run_experiment(guard.cfg, &res.result); rc != SLSE_OK) {
            std::fprintf(stderr, "error: %s\n", slse_last_error());
            return exit_code_for(rc);
        }
        // Output files configured through out-csv/out-json/out-svg were
        // written by the run itself.
        print_run_summary(res.result);
        return 0;
    }

    if (pe->parsed()) {
        if (!pe_n.empty()) pe_kv.emplace_back("n", pe_n);
        if (!pe_d.empty()) pe_kv.emplace_back("d", pe_d);
        pe_kv.emplace_back("pe-m", pe_m);
        if (!pe_sketch.empty()) pe_kv.emplace_back("sketch", pe_sketch);
        if (!pe_trials.empty()) pe_kv.emplace_back("trials", pe_trials);
        if (!pe_seed.empty()) pe_kv.emplace_back("seed", pe_seed);
        if (!pe_cond.empty()) pe_kv.emplace_back("cond", pe_cond);
        if (int rc = apply_flags(guard.cfg, pe_kv); rc != SLSE_OK) return exit_code_for(rc);

        double pe_value = 0.0;
        if (int rc = slse_estimate_pe(guard.cfg, &pe_value); rc != SLSE_OK) {
            std::fprintf(stderr, "error: %s\n", slse_last_error());
            return exit_code_for(rc);
        }
        std::printf("PE = %.6f\n", pe_value);
        return 0;
    }

    // selfcheck
    const int rc = slse_selfcheck(quiet ? 0 : 1);
    if (rc != SLSE_OK) {
        std::fprintf(stderr, "error: %s\n", slse_last_error());
        return exit_code_for(rc);
    }
    return 0;
}
