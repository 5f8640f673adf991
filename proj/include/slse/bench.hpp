#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "slse/solver.hpp"

namespace slse {

/// Experiment configuration. Every field has a documented default; the same
/// keys are accepted from config files (flat key=value lines, '#' comments),
/// from the CLI flags and from the C API setter.
struct ExperimentConfig {
    std::size_t n = 4096;
    std::size_t d = 32;
    double kappa = 1e4;
    double sigma2 = 1e-8;
    std::uint64_t seed = 1;
    std::size_t trials = 10;
    std::vector<std::string> solvers = {"slse-frs"};
    SketchKind sketch = SketchKind::srht;
    double omega = 0.0625;
    std::string ai = "2";  // "k", "k_1,...,k_K", or "theorem4"
    double r_mult = 6.0;
    std::size_t m1_mult = 8;
    std::vector<std::uint64_t> sizes;  // explicit override of the doubling schedule
    std::size_t t_max = 100;
    StopMode stop = StopMode::oracle;
    double tol = 1e-10;
    double target_factor = 2.0;  // time/flops-to-target threshold, factor of Delta_OLS
    double mu = std::numeric_limits<double>::quiet_NaN();
    double eta = std::numeric_limits<double>::quiet_NaN();
    bool timing = true;   // false zeroes wall_seconds for byte-stable output
    std::size_t threads = 0;  // 0 = hardware concurrency
    std::size_t mem_cap_mb = 4096;
    std::size_t pe_m = 0;  // sketch size for the `pe` estimator
    std::string out_csv;
    std::string out_json;
    std::string out_svg;
};

void config_set(ExperimentConfig& cfg, const std::string& key, const std::string& value);
void config_load_file(ExperimentConfig& cfg, const std::string& path);

struct SolverSummary {
    std::string solver;
    std::vector<double> final_pred_error;
    std::vector<double> flops_to_target;  // NaN when the target was not reached
    std::vector<double> time_to_target;
    std::vector<double> total_flops;
    std::vector<double> init_flops;
    std::vector<double> hessian_build_flops;
    std::vector<double> init_seconds;
    std::vector<double> total_seconds;
    std::vector<std::uint64_t> iterations;
    std::vector<int> reached;
    std::vector<std::vector<int>> a_used;
    std::vector<double> init_ratio;
    std::vector<int> theorem5_condition;

    double mean_final_pred_error = 0.0;
    double mean_flops_to_target = 0.0;  // over reached trials
    double mean_time_to_target = 0.0;
    double mean_total_flops = 0.0;
    double mean_init_seconds = 0.0;
    double mean_total_seconds = 0.0;
    std::size_t reached_count = 0;
};

struct ExperimentResult {
    ExperimentConfig cfg;
    std::vector<RunRecord> records;  // sorted by (trial, solver position, iter)
    std::vector<double> delta_ols;   // per-trial oracle
    std::vector<double> target;      // per-trial stop target
    std::vector<SolverSummary> summaries;
};

/// Runs trials (in parallel across a worker pool) with paired models: within
/// a trial every solver sees the same (X, Y, beta) and the same Hessian
/// sketch. Validates the configuration before any work.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Monte-Carlo estimate of the relative prediction efficiency
/// E||X(bt - b)||^2 / E||X(bh - b)||^2 at sketch size m: X is held fixed,
/// noise and sketch are redrawn per trial, and both least-squares problems
/// are solved exactly. `identity` forces S = I (requires m == n).
double estimate_pe(std::size_t n, std::size_t d, std::size_t m, SketchKind kind,
                   std::size_t trials, std::uint64_t seed, double kappa = 1e4,
                   std::size_t threads = 0);

std::string summary_json(const ExperimentResult& result);
std::string records_csv(const std::vector<RunRecord>& records);
std::vector<RunRecord> parse_records_csv(const std::string& text);

/// Writes whichever of the three paths are nonempty (atomically: temp file
/// plus rename). Throws on empty records before touching the filesystem.
void emit_outputs(const ExperimentResult& result, const std::string& csv_path,
                  const std::string& json_path, const std::string& svg_path);

/// Quick internal consistency checks; returns 0 when everything passes.
int selfcheck(bool verbose);

const char* sketch_kind_name(SketchKind kind);
SketchKind sketch_kind_from_name(const std::string& name);

}  // namespace slse
