/*
 * C interface to the ECCO gradient-flow optimization library.
 *
 * All handles are opaque and owned by the caller once created; release them
 * with the matching *_destroy function. Every fallible call returns an
 * ecco_status; on failure a message for the calling thread is available from
 * ecco_last_error() until the next failing call on that thread.
 */
#ifndef ECCO_ECCO_H
#define ECCO_ECCO_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(ECCO_BUILDING_LIBRARY)
#    define ECCO_API __declspec(dllexport)
#  else
#    define ECCO_API __declspec(dllimport)
#  endif
#else
#  define ECCO_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ecco_status {
    ECCO_OK = 0,
    ECCO_ERR_USAGE = 1,
    ECCO_ERR_EVALUATION = 2,
    ECCO_ERR_UNSUPPORTED = 3,
    ECCO_ERR_IO = 4,
    ECCO_ERR_STEP_FAILURE = 5,
    ECCO_ERR_INTERNAL = 6
} ecco_status;

/* Terminal state of a solve; values match the trace schema. */
typedef enum ecco_run_status {
    ECCO_RUN_CONVERGED = 0,
    ECCO_RUN_MAX_ITERS = 1,
    ECCO_RUN_STEP_FAILURE = 2,
    ECCO_RUN_EVALUATION_ERROR = 3
} ecco_run_status;

typedef struct ecco_objective ecco_objective;
typedef struct ecco_config ecco_config;
typedef struct ecco_result ecco_result;

typedef struct ecco_iter_record {
    int32_t iter;
    double t;
    double dt;
    double f;
    double grad_norm;
    double lyap;
    double z_min;
    double z_max;
    int32_t eatss_trials;
    uint64_t grad_evals;
    uint64_t hess_evals;
} ecco_iter_record;

ECCO_API const char* ecco_version(void);
ECCO_API const char* ecco_last_error(void);
ECCO_API const char* ecco_status_string(ecco_status status);
ECCO_API const char* ecco_run_status_string(ecco_run_status status);

/* Objectives: built-in test functions by name ("rosenbrock", ...). dim = 0
 * selects the function's default dimension. */
ECCO_API ecco_status ecco_objective_create(const char* name, size_t dim, ecco_objective** out);
ECCO_API void ecco_objective_destroy(ecco_objective* obj);
ECCO_API size_t ecco_objective_dim(const ecco_objective* obj);
ECCO_API ecco_status ecco_objective_value(const ecco_objective* obj, const double* x, size_t n,
                                          double* out);
ECCO_API ecco_status ecco_objective_gradient(const ecco_objective* obj, const double* x, size_t n,
                                             double* out);
/* Row-major n*n output. */
ECCO_API ecco_status ecco_objective_hessian(const ecco_objective* obj, const double* x, size_t n,
                                            double* out);
ECCO_API size_t ecco_objective_num_inits(const ecco_objective* obj);
ECCO_API ecco_status ecco_objective_init(const ecco_objective* obj, size_t index, double* out,
                                         size_t n);
ECCO_API size_t ecco_objective_num_minimizers(const ecco_objective* obj);
ECCO_API ecco_status ecco_objective_minimizer(const ecco_objective* obj, size_t index, double* out,
                                              size_t n);

/* Solver configuration. Keys match the CLI flags without the leading dashes:
 * method, control, delta, normalize, integrator, eta, alpha, beta, armijo-c,
 * dt-init, rk4-weights, epsilon, grad-tol, max-iters, dgamma, lr, beta1,
 * beta2, ... ecco_config_preset replaces the configuration with a named
 * preset ("ecco-approx-fe", "gd-armijo", "adam", ...). */
ECCO_API ecco_status ecco_config_create(ecco_config** out);
ECCO_API void ecco_config_destroy(ecco_config* cfg);
ECCO_API ecco_status ecco_config_set(ecco_config* cfg, const char* key, const char* value);
ECCO_API ecco_status ecco_config_preset(ecco_config* cfg, const char* preset);

/* Runs the configured method from x0. A run that stops with step failure or an
 * evaluation error still returns ECCO_OK; inspect ecco_result_status. */
ECCO_API ecco_status ecco_solve(const ecco_objective* obj, const double* x0, size_t n,
                                const ecco_config* cfg, ecco_result** out);
ECCO_API void ecco_result_destroy(ecco_result* res);
ECCO_API ecco_run_status ecco_result_status(const ecco_result* res);
ECCO_API const char* ecco_result_message(const ecco_result* res);
ECCO_API size_t ecco_result_dim(const ecco_result* res);
ECCO_API ecco_status ecco_result_x(const ecco_result* res, double* out, size_t n);
ECCO_API size_t ecco_result_num_records(const ecco_result* res);
ECCO_API ecco_status ecco_result_record(const ecco_result* res, size_t index, ecco_iter_record* out);
ECCO_API size_t ecco_result_num_boundaries(const ecco_result* res);
ECCO_API ecco_status ecco_result_boundary(const ecco_result* res, size_t index, double* gamma,
                                          int32_t* iter);
ECCO_API ecco_status ecco_result_write_csv(const ecco_result* res, const char* path);

/* Experiment drivers. On success *summary_json receives a heap string owned by
 * the caller (free with ecco_string_free). output_dir may be NULL to keep the
 * spec's (or ECCO_OUTPUT_DIR's) directory. */
ECCO_API ecco_status ecco_run_experiment(const char* spec_path, const char* output_dir,
                                         char** summary_json);
ECCO_API ecco_status ecco_run_sweep(const char* spec_path, const char* output_dir,
                                    char** summary_json);
ECCO_API ecco_status ecco_bench_scaling(const size_t* n_values, size_t count, char** table_json);
ECCO_API void ecco_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* ECCO_ECCO_H */
