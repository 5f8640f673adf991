#include "slsefrs.h"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <string>

#include "slse/bench.hpp"
#include "slse/error.hpp"
#include "slse/model.hpp"

struct slse_config_s {
    slse::ExperimentConfig cfg;
};

struct slse_result_s {
    slse::ExperimentResult result;
};

struct slse_model_s {
    slse::LinearModel model;
};

namespace {

thread_local std::string g_last_error;

int fail(int code, const char* what) {
    g_last_error = what;
    return code;
}

// Runs fn, translating C++ exceptions to status codes.
template <typename Fn>
int guarded(Fn&& fn) {
    try {
        fn();
        return SLSE_OK;
    } catch (const slse::error& e) {
        return fail(static_cast<int>(e.code()), e.what());
    } catch (const std::bad_alloc&) {
        return fail(SLSE_ERR_NUMERIC, "out of memory");
    } catch (const std::exception& e) {
        return fail(SLSE_ERR_INVALID, e.what());
    }
}

int require(bool ok, const char* what) { return ok ? SLSE_OK : fail(SLSE_ERR_INVALID, what); }

}  // namespace

extern "C" {

const char* slse_version(void) { return "1.0.0"; }

const char* slse_last_error(void) { return g_last_error.c_str(); }

int slse_config_create(slse_config** out) {
    if (int rc = require(out != nullptr, "slse_config_create: out is NULL")) return rc;
    return guarded([&] { *out = new slse_config_s(); });
}

void slse_config_free(slse_config* cfg) { delete cfg; }

int slse_config_set(slse_config* cfg, const char* key, const char* value) {
    if (int rc = require(cfg && key && value, "slse_config_set: NULL argument")) return rc;
    return guarded([&] { slse::config_set(cfg->cfg, key, value); });
}

int slse_config_load_file(slse_config* cfg, const char* path) {
    if (int rc = require(cfg && path, "slse_config_load_file: NULL argument")) return rc;
    return guarded([&] { slse::config_load_file(cfg->cfg, path); });
}

int slse_run_experiment(const slse_config* cfg, slse_result** out) {
    if (int rc = require(cfg && out, "slse_run_experiment: NULL argument")) return rc;
    return guarded([&] {
        auto result = std::make_unique<slse_result_s>();
        result->result = slse::run_experiment(cfg->cfg);
        *out = result.release();
    });
}

void slse_result_free(slse_result* result) { delete result; }

int slse_result_num_records(const slse_result* result, uint64_t* out) {
    if (int rc = require(result && out, "slse_result_num_records: NULL argument")) return rc;
    *out = result->result.records.size();
    return SLSE_OK;
}

int slse_result_record(const slse_result* result, uint64_t index, slse_record* out) {
    if (int rc = require(result && out, "slse_result_record: NULL argument")) return rc;
    if (index >= result->result.records.size())
        return fail(SLSE_ERR_INVALID, "slse_result_record: index out of range");
    const slse::RunRecord& rec = result->result.records[static_cast<std::size_t>(index)];
    out->trial = rec.trial;
    std::snprintf(out->solver, sizeof(out->solver), "%s", rec.solver.c_str());
    out->iter = rec.iter;
    out->stage = rec.stage;
    out->m_active = rec.m_active;
    out->pred_error = rec.pred_error;
    out->cum_flops = rec.cum_flops;
    out->wall_seconds = rec.wall_seconds;
    return SLSE_OK;
}

int slse_result_summary_json(const slse_result* result, char** json_out) {
    if (int rc = require(result && json_out, "slse_result_summary_json: NULL argument")) return rc;
    return guarded([&] {
        const std::string s = slse::summary_json(result->result);
        char* buf = static_cast<char*>(std::malloc(s.size() + 1));
        if (!buf) throw std::bad_alloc();
        std::memcpy(buf, s.c_str(), s.size() + 1);
        *json_out = buf;
    });
}

void slse_string_free(char* s) { std::free(s); }

int slse_result_emit(const slse_result* result, const char* csv_path, const char* json_path,
                     const char* svg_path) {
    if (int rc = require(result != nullptr, "slse_result_emit: result is NULL")) return rc;
    return guarded([&] {
        slse::emit_outputs(result->result, csv_path ? csv_path : "", json_path ? json_path : "",
                           svg_path ? svg_path : "");
    });
}

int slse_estimate_pe(const slse_config* cfg, double* pe_out) {
    if (int rc = require(cfg && pe_out, "slse_estimate_pe: NULL argument")) return rc;
    return guarded([&] {
        const slse::ExperimentConfig& c = cfg->cfg;
        if (c.pe_m == 0)
            throw slse::config_error("estimate_pe: set the sketch size first (key pe-m or m)");
        *pe_out = slse::estimate_pe(c.n, c.d, c.pe_m, c.sketch, c.trials, c.seed, c.kappa,
                                    c.threads);
    });
}

int slse_model_generate(uint64_t n, uint64_t d, double cond, double sigma2, uint64_t seed,
                        slse_model** out) {
    if (int rc = require(out != nullptr, "slse_model_generate: out is NULL")) return rc;
    return guarded([&] {
        auto model = std::make_unique<slse_model_s>();
        model->model = slse::gen_model(static_cast<std::size_t>(n), static_cast<std::size_t>(d),
                                       cond, sigma2, seed);
        *out = model.release();
    });
}

int slse_model_save(const slse_model* model, const char* path) {
    if (int rc = require(model && path, "slse_model_save: NULL argument")) return rc;
    return guarded([&] { slse::model_save(model->model, path); });
}

int slse_model_load(const char* path, slse_model** out) {
    if (int rc = require(path && out, "slse_model_load: NULL argument")) return rc;
    return guarded([&] {
        auto model = std::make_unique<slse_model_s>();
        model->model = slse::model_load(path);
        *out = model.release();
    });
}

void slse_model_free(slse_model* model) { delete model; }

int slse_model_dims(const slse_model* model, uint64_t* n_out, uint64_t* d_out) {
    if (int rc = require(model && n_out && d_out, "slse_model_dims: NULL argument")) return rc;
    *n_out = model->model.n;
    *d_out = model->model.d;
    return SLSE_OK;
}

int slse_model_ols(const slse_model* model, double* beta_out) {
    if (int rc = require(model && beta_out, "slse_model_ols: NULL argument")) return rc;
    return guarded([&] {
        const slse::Vector beta = slse::ols_solve(model->model);
        std::memcpy(beta_out, beta.data(), beta.size() * sizeof(double));
    });
}

int slse_model_pred_error(const slse_model* model, const double* b, uint64_t len, double* out) {
    if (int rc = require(model && b && out, "slse_model_pred_error: NULL argument")) return rc;
    return guarded([&] {
        const slse::Vector coeffs(b, b + len);
        *out = slse::pred_error(model->model, coeffs);
    });
}

int slse_selfcheck(int verbose) {
    int rc = SLSE_OK;
    int status = guarded([&] { rc = slse::selfcheck(verbose != 0); });
    if (status != SLSE_OK) return status;
    return rc == 0 ? SLSE_OK : fail(SLSE_ERR_NUMERIC, "selfcheck failed");
}

}  // extern "C"
