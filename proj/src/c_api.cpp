#include "ecco/ecco.h"

#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <string>

#include "ecco/core/errors.hpp"
#include "ecco/core/experiment.hpp"
#include "ecco/core/options.hpp"
#include "ecco/core/report.hpp"
#include "ecco/core/solver.hpp"
#include "ecco/core/test_functions.hpp"

struct ecco_objective {
    ecco::TestFunction fn;
};

struct ecco_config {
    ecco::SolveConfig cfg;
};

struct ecco_result {
    ecco::Trace trace;
};

namespace {

thread_local std::string g_last_error;

ecco_status fail(ecco_status status, const std::string& message) {
    g_last_error = message;
    return status;
}

ecco_status map_error(const ecco::Error& e) {
    switch (e.kind()) {
        case ecco::ErrorKind::usage:
            return fail(ECCO_ERR_USAGE, e.what());
        case ecco::ErrorKind::evaluation:
            return fail(ECCO_ERR_EVALUATION, e.what());
        case ecco::ErrorKind::unsupported:
            return fail(ECCO_ERR_UNSUPPORTED, e.what());
        case ecco::ErrorKind::io:
            return fail(ECCO_ERR_IO, e.what());
        case ecco::ErrorKind::step_failure:
            return fail(ECCO_ERR_STEP_FAILURE, e.what());
    }
    return fail(ECCO_ERR_INTERNAL, e.what());
}

// Runs `body`, translating exceptions into status codes.
template <typename F>
ecco_status guarded(F&& body) noexcept {
    try {
        return body();
    } catch (const ecco::Error& e) {
        return map_error(e);
    } catch (const std::bad_alloc&) {
        return fail(ECCO_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(ECCO_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(ECCO_ERR_INTERNAL, "unknown error");
    }
}

ecco::Vector to_vector(const double* x, size_t n) {
    return Eigen::Map<const ecco::Vector>(x, static_cast<Eigen::Index>(n));
}

ecco_status require(bool ok, const char* what) {
    return ok ? ECCO_OK : fail(ECCO_ERR_USAGE, what);
}

char* dup_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

ecco_status copy_vector(const ecco::Vector& v, double* out, size_t n) {
    if (out == nullptr || n != static_cast<size_t>(v.size())) {
        return fail(ECCO_ERR_USAGE, "output buffer length does not match the dimension");
    }
    std::memcpy(out, v.data(), n * sizeof(double));
    return ECCO_OK;
}

}  // namespace

extern "C" {

const char* ecco_version(void) { return "1.0.0"; }

const char* ecco_last_error(void) { return g_last_error.c_str(); }

const char* ecco_status_string(ecco_status status) {
    switch (status) {
        case ECCO_OK:
            return "ok";
        case ECCO_ERR_USAGE:
            return "usage error";
        case ECCO_ERR_EVALUATION:
            return "evaluation error";
        case ECCO_ERR_UNSUPPORTED:
            return "unsupported operation";
        case ECCO_ERR_IO:
            return "I/O error";
        case ECCO_ERR_STEP_FAILURE:
            return "step failure";
        case ECCO_ERR_INTERNAL:
            return "internal error";
    }
    return "unknown status";
}

const char* ecco_run_status_string(ecco_run_status status) {
    return ecco::to_string(static_cast<ecco::Status>(status));
}

ecco_status ecco_objective_create(const char* name, size_t dim, ecco_objective** out) {
    return guarded([&] {
        if (auto s = require(name != nullptr && out != nullptr, "null argument"); s != ECCO_OK) {
            return s;
        }
        const auto d = dim == 0 ? ecco::default_dim(name) : static_cast<ecco::Index>(dim);
        *out = new ecco_objective{ecco::make_test_function(name, d)};
        return ECCO_OK;
    });
}

void ecco_objective_destroy(ecco_objective* obj) { delete obj; }

size_t ecco_objective_dim(const ecco_objective* obj) {
    return obj ? static_cast<size_t>(obj->fn.objective.dim()) : 0;
}

ecco_status ecco_objective_value(const ecco_objective* obj, const double* x, size_t n, double* out) {
    return guarded([&] {
        if (auto s = require(obj && x && out, "null argument"); s != ECCO_OK) {
            return s;
        }
        *out = obj->fn.objective.value(to_vector(x, n));
        return ECCO_OK;
    });
}

ecco_status ecco_objective_gradient(const ecco_objective* obj, const double* x, size_t n,
                                    double* out) {
    return guarded([&] {
        if (auto s = require(obj && x && out, "null argument"); s != ECCO_OK) {
            return s;
        }
        return copy_vector(obj->fn.objective.gradient(to_vector(x, n)), out, n);
    });
}

ecco_status ecco_objective_hessian(const ecco_objective* obj, const double* x, size_t n,
                                   double* out) {
    return guarded([&] {
        if (auto s = require(obj && x && out, "null argument"); s != ECCO_OK) {
            return s;
        }
        const ecco::Matrix h = obj->fn.objective.hessian(to_vector(x, n));
        Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
            out, h.rows(), h.cols()) = h;
        return ECCO_OK;
    });
}

size_t ecco_objective_num_inits(const ecco_objective* obj) {
    return obj ? obj->fn.spec.default_inits.size() : 0;
}

ecco_status ecco_objective_init(const ecco_objective* obj, size_t index, double* out, size_t n) {
    return guarded([&] {
        if (auto s = require(obj && index < obj->fn.spec.default_inits.size(), "index out of range");
            s != ECCO_OK) {
            return s;
        }
        return copy_vector(obj->fn.spec.default_inits[index], out, n);
    });
}

size_t ecco_objective_num_minimizers(const ecco_objective* obj) {
    return obj ? obj->fn.spec.known_minimizers.size() : 0;
}

ecco_status ecco_objective_minimizer(const ecco_objective* obj, size_t index, double* out, size_t n) {
    return guarded([&] {
        if (auto s = require(obj && index < obj->fn.spec.known_minimizers.size(), "index out of range");
            s != ECCO_OK) {
            return s;
        }
        return copy_vector(obj->fn.spec.known_minimizers[index], out, n);
    });
}

ecco_status ecco_config_create(ecco_config** out) {
    return guarded([&] {
        if (auto s = require(out != nullptr, "null argument"); s != ECCO_OK) {
            return s;
        }
        *out = new ecco_config{};
        return ECCO_OK;
    });
}

void ecco_config_destroy(ecco_config* cfg) { delete cfg; }

ecco_status ecco_config_set(ecco_config* cfg, const char* key, const char* value) {
    return guarded([&] {
        if (auto s = require(cfg && key && value, "null argument"); s != ECCO_OK) {
            return s;
        }
        ecco::SolveConfig updated = cfg->cfg;
        ecco::apply_option(updated, key, value);
        cfg->cfg = std::move(updated);
        return ECCO_OK;
    });
}

ecco_status ecco_config_preset(ecco_config* cfg, const char* preset) {
    return guarded([&] {
        if (auto s = require(cfg && preset, "null argument"); s != ECCO_OK) {
            return s;
        }
        cfg->cfg = ecco::preset_config(preset);
        return ECCO_OK;
    });
}

ecco_status ecco_solve(const ecco_objective* obj, const double* x0, size_t n, const ecco_config* cfg,
                       ecco_result** out) {
    return guarded([&] {
        if (auto s = require(obj && x0 && cfg && out, "null argument"); s != ECCO_OK) {
            return s;
        }
        auto res = std::make_unique<ecco_result>();
        res->trace = ecco::solve(obj->fn.objective, to_vector(x0, n), cfg->cfg);
        *out = res.release();
        return ECCO_OK;
    });
}

void ecco_result_destroy(ecco_result* res) { delete res; }

ecco_run_status ecco_result_status(const ecco_result* res) {
    return res ? static_cast<ecco_run_status>(res->trace.status) : ECCO_RUN_EVALUATION_ERROR;
}

const char* ecco_result_message(const ecco_result* res) {
    return res ? res->trace.message.c_str() : "";
}

size_t ecco_result_dim(const ecco_result* res) {
    return res ? static_cast<size_t>(res->trace.x_final.size()) : 0;
}

ecco_status ecco_result_x(const ecco_result* res, double* out, size_t n) {
    return guarded([&] {
        if (auto s = require(res != nullptr, "null argument"); s != ECCO_OK) {
            return s;
        }
        return copy_vector(res->trace.x_final, out, n);
    });
}

size_t ecco_result_num_records(const ecco_result* res) { return res ? res->trace.records.size() : 0; }

ecco_status ecco_result_record(const ecco_result* res, size_t index, ecco_iter_record* out) {
    return guarded([&] {
        if (auto s = require(res && out && index < res->trace.records.size(), "index out of range");
            s != ECCO_OK) {
            return s;
        }
        const ecco::IterRecord& r = res->trace.records[index];
        *out = ecco_iter_record{r.iter,      r.t,     r.dt,           r.f,
                                r.grad_norm, r.lyap,  r.z_min,        r.z_max,
                                r.eatss_trials, r.evals.grad, r.evals.hess};
        return ECCO_OK;
    });
}

size_t ecco_result_num_boundaries(const ecco_result* res) {
    return res ? res->trace.homotopy_boundaries.size() : 0;
}

ecco_status ecco_result_boundary(const ecco_result* res, size_t index, double* gamma, int32_t* iter) {
    return guarded([&] {
        if (auto s = require(res && gamma && iter && index < res->trace.homotopy_boundaries.size(),
                             "index out of range");
            s != ECCO_OK) {
            return s;
        }
        *gamma = res->trace.homotopy_boundaries[index].first;
        *iter = res->trace.homotopy_boundaries[index].second;
        return ECCO_OK;
    });
}

ecco_status ecco_result_write_csv(const ecco_result* res, const char* path) {
    return guarded([&] {
        if (auto s = require(res && path, "null argument"); s != ECCO_OK) {
            return s;
        }
        ecco::emit_trace_csv(res->trace, path);
        return ECCO_OK;
    });
}

ecco_status ecco_run_experiment(const char* spec_path, const char* output_dir, char** summary_json) {
    return guarded([&] {
        if (auto s = require(spec_path && summary_json, "null argument"); s != ECCO_OK) {
            return s;
        }
        ecco::ExperimentSpec spec = ecco::load_experiment_spec(spec_path);
        if (output_dir) {
            spec.output_dir = output_dir;
        }
        *summary_json = dup_string(ecco::to_json(ecco::run_experiment(spec)).dump(2));
        return ECCO_OK;
    });
}

ecco_status ecco_run_sweep(const char* spec_path, const char* output_dir, char** summary_json) {
    return guarded([&] {
        if (auto s = require(spec_path && summary_json, "null argument"); s != ECCO_OK) {
            return s;
        }
        ecco::ExperimentSpec spec = ecco::load_experiment_spec(spec_path);
        if (output_dir) {
            spec.output_dir = output_dir;
        }
        *summary_json = dup_string(ecco::to_json(ecco::run_robustness_sweep(spec)).dump(2));
        return ECCO_OK;
    });
}

ecco_status ecco_bench_scaling(const size_t* n_values, size_t count, char** table_json) {
    return guarded([&] {
        if (auto s = require((n_values || count == 0) && table_json, "null argument"); s != ECCO_OK) {
            return s;
        }
        std::vector<ecco::Index> ns;
        for (size_t i = 0; i < count; ++i) {
            ns.push_back(static_cast<ecco::Index>(n_values[i]));
        }
        *table_json = dup_string(ecco::to_json(ecco::run_scaling_bench(ns)).dump(2));
        return ECCO_OK;
    });
}

void ecco_string_free(char* s) { delete[] s; }

}  // extern "C"
