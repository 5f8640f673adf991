/* slsefrs: randomized least-squares solver benchmark library.
 *
 * C interface over the C++ core: opaque handles, integer status codes,
 * thread-local error messages. All functions return SLSE_OK (0) on success;
 * on failure they return a nonzero status and leave a description in
 * slse_last_error().
 */
#ifndef SLSEFRS_H
#define SLSEFRS_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define SLSE_OK 0
#define SLSE_ERR_INVALID 1 /* bad argument or shape */
#define SLSE_ERR_CONFIG 2  /* infeasible or inconsistent configuration */
#define SLSE_ERR_NUMERIC 3 /* singularity, divergence, breakdown */
#define SLSE_ERR_IO 4      /* file read/write failure */

const char* slse_version(void);

/* Message describing the most recent failure on this thread. Never NULL. */
const char* slse_last_error(void);

/* ---- experiment configuration ---------------------------------------- */

typedef struct slse_config_s slse_config;

int slse_config_create(slse_config** out);
void slse_config_free(slse_config* cfg);

/* Accepts the same keys as the config file and the CLI flags: n, d, cond,
 * sigma2, seed, trials, solvers, sketch, omega, ai, r-mult, m1-mult, sizes,
 * t-max, stop, tol, target-factor, mu, eta, timing, threads, mem-cap-mb,
 * pe-m, out-csv, out-json, out-svg. */
int slse_config_set(slse_config* cfg, const char* key, const char* value);

/* Loads key=value lines ('#' starts a comment). */
int slse_config_load_file(slse_config* cfg, const char* path);

/* ---- experiment runs -------------------------------------------------- */

typedef struct slse_result_s slse_result;

typedef struct {
    uint64_t trial;
    char solver[16];
    uint64_t iter;
    int32_t stage;
    uint64_t m_active;
    double pred_error;
    uint64_t cum_flops;
    double wall_seconds;
} slse_record;

int slse_run_experiment(const slse_config* cfg, slse_result** out);
void slse_result_free(slse_result* result);

int slse_result_num_records(const slse_result* result, uint64_t* out);
int slse_result_record(const slse_result* result, uint64_t index, slse_record* out);

/* Versioned summary document; free with slse_string_free. */
int slse_result_summary_json(const slse_result* result, char** json_out);
void slse_string_free(char* s);

/* Writes the standard outputs; pass NULL or "" to skip a file. */
int slse_result_emit(const slse_result* result, const char* csv_path, const char* json_path,
                     const char* svg_path);

/* Relative prediction efficiency estimate for the configured n, d, sketch
 * kind and trial count at sketch size pe-m. */
int slse_estimate_pe(const slse_config* cfg, double* pe_out);

/* ---- synthetic models ------------------------------------------------- */

typedef struct slse_model_s slse_model;

int slse_model_generate(uint64_t n, uint64_t d, double cond, double sigma2, uint64_t seed,
                        slse_model** out);
int slse_model_save(const slse_model* model, const char* path);
int slse_model_load(const char* path, slse_model** out);
void slse_model_free(slse_model* model);

int slse_model_dims(const slse_model* model, uint64_t* n_out, uint64_t* d_out);

/* Exact OLS coefficients; beta_out must hold d doubles. */
int slse_model_ols(const slse_model* model, double* beta_out);

/* ||X (b - beta_true)||^2 for a coefficient vector of length len (== d). */
int slse_model_pred_error(const slse_model* model, const double* b, uint64_t len, double* out);

/* Quick library consistency checks; returns SLSE_OK when clean. */
int slse_selfcheck(int verbose);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* SLSEFRS_H */
