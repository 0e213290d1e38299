// Command-line front end. Talks to the library exclusively through ecco.h.

#include <cstdio>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ecco/ecco.h"

namespace {

int exit_code(ecco_status s) {
    switch (s) {
        case ECCO_OK:
            return 0;
        case ECCO_ERR_USAGE:
            return 2;
        case ECCO_ERR_IO:
            return 3;
        default:
            return 4;
    }
}

int report_failure(ecco_status s) {
    std::cerr << "ecco: " << ecco_status_string(s) << ": " << ecco_last_error() << '\n';
    return exit_code(s);
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        size_t used = 0;
        out.push_back(std::stod(cell, &used));
        if (used != cell.size()) {
            throw std::invalid_argument(cell);
        }
    }
    return out;
}

struct ObjectiveDeleter {
    void operator()(ecco_objective* p) const { ecco_objective_destroy(p); }
};
struct ConfigDeleter {
    void operator()(ecco_config* p) const { ecco_config_destroy(p); }
};
struct ResultDeleter {
    void operator()(ecco_result* p) const { ecco_result_destroy(p); }
};
struct StringDeleter {
    void operator()(char* p) const { ecco_string_free(p); }
};

int print_json_result(ecco_status s, char* json) {
    std::unique_ptr<char, StringDeleter> owned(json);
    if (s != ECCO_OK) {
        return report_failure(s);
    }
    std::cout << owned.get() << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gradient-flow optimization with equivalent-circuit control"};
    app.require_subcommand(1);

    std::string spec_path;
    std::string output_dir;

    auto* run = app.add_subcommand("run", "Run every method of an experiment spec");
    run->add_option("spec", spec_path, "Experiment spec (JSON)")->required();
    run->add_option("--output-dir", output_dir, "Override output directory");

    auto* sweep = app.add_subcommand("sweep", "Hyperparameter robustness sweep");
    sweep->add_option("spec", spec_path, "Experiment spec with a perturbation block")->required();
    sweep->add_option("--output-dir", output_dir, "Override output directory");

    std::string n_list = "512,1024,2048,4096";
    auto* bench = app.add_subcommand("bench-scaling", "Control evaluation cost versus dimension");
    bench->add_option("--n", n_list, "Comma-separated dimensions (multiples of 4)");

    auto* solve = app.add_subcommand("solve", "Solve one test problem");
    std::string fn = "rosenbrock";
    size_t dim = 0;
    std::string init;
    std::string preset;
    std::string trace_path;
    std::vector<std::pair<std::string, std::string>> knobs;
    solve->add_option("--fn", fn, "Test function name");
    solve->add_option("--dim", dim, "Dimension (default depends on the function)");
    solve->add_option("--init", init, "Initial point, comma-separated (default: first stock init)");
    solve->add_option("--preset", preset, "Method preset, e.g. ecco-approx-fe, gd-armijo, adam");
    solve->add_option("--trace", trace_path, "Write the trace CSV here");

    // Knobs forwarded verbatim to ecco_config_set.
    const char* knob_names[] = {"method",    "control", "delta",       "integrator", "eta",
                                "alpha",     "beta",    "armijo-c",    "dt-init",    "epsilon",
                                "grad-tol",  "max-iters", "dgamma",    "rk4-weights", "lr",
                                "beta1",     "beta2",   "max-trials",  "inner-epsilon", "eatss"};
    std::vector<std::string> knob_values(std::size(knob_names));
    for (size_t i = 0; i < std::size(knob_names); ++i) {
        solve->add_option(std::string("--") + knob_names[i], knob_values[i]);
    }
    bool no_normalize = false;
    solve->add_flag("--no-normalize", no_normalize, "Disable max-normalization of the control");

    CLI11_PARSE(app, argc, argv);

    if (run->parsed() || sweep->parsed()) {
        char* json = nullptr;
        const char* dir = output_dir.empty() ? nullptr : output_dir.c_str();
        const ecco_status s = run->parsed() ? ecco_run_experiment(spec_path.c_str(), dir, &json)
                                            : ecco_run_sweep(spec_path.c_str(), dir, &json);
        return print_json_result(s, json);
    }

    if (bench->parsed()) {
        std::vector<size_t> ns;
        try {
            for (double v : parse_list(n_list)) {
                ns.push_back(static_cast<size_t>(v));
            }
        } catch (const std::exception&) {
            std::cerr << "ecco: --n expects a comma-separated list of integers\n";
            return 2;
        }
        char* json = nullptr;
        const ecco_status s = ecco_bench_scaling(ns.data(), ns.size(), &json);
        return print_json_result(s, json);
    }

    // solve
    ecco_objective* raw_obj = nullptr;
    if (ecco_status s = ecco_objective_create(fn.c_str(), dim, &raw_obj); s != ECCO_OK) {
        return report_failure(s);
    }
    std::unique_ptr<ecco_objective, ObjectiveDeleter> obj(raw_obj);
    const size_t n = ecco_objective_dim(obj.get());

    std::vector<double> x0(n);
    if (init.empty()) {
        if (ecco_status s = ecco_objective_init(obj.get(), 0, x0.data(), n); s != ECCO_OK) {
            return report_failure(s);
        }
    } else {
        try {
            x0 = parse_list(init);
        } catch (const std::exception&) {
            std::cerr << "ecco: --init expects comma-separated numbers\n";
            return 2;
        }
        if (x0.size() == 1 && n > 1) {
            x0.assign(n, x0.front());
        }
    }

    ecco_config* raw_cfg = nullptr;
    if (ecco_status s = ecco_config_create(&raw_cfg); s != ECCO_OK) {
        return report_failure(s);
    }
    std::unique_ptr<ecco_config, ConfigDeleter> cfg(raw_cfg);
    if (!preset.empty()) {
        if (ecco_status s = ecco_config_preset(cfg.get(), preset.c_str()); s != ECCO_OK) {
            return report_failure(s);
        }
    }
    for (size_t i = 0; i < std::size(knob_names); ++i) {
        if (knob_values[i].empty()) {
            continue;
        }
        if (ecco_status s = ecco_config_set(cfg.get(), knob_names[i], knob_values[i].c_str());
            s != ECCO_OK) {
            return report_failure(s);
        }
    }
    if (no_normalize) {
        if (ecco_status s = ecco_config_set(cfg.get(), "normalize", "false"); s != ECCO_OK) {
            return report_failure(s);
        }
    }

    ecco_result* raw_res = nullptr;
    if (ecco_status s = ecco_solve(obj.get(), x0.data(), x0.size(), cfg.get(), &raw_res);
        s != ECCO_OK) {
        return report_failure(s);
    }
    std::unique_ptr<ecco_result, ResultDeleter> res(raw_res);

    std::vector<double> x(ecco_result_dim(res.get()));
    ecco_result_x(res.get(), x.data(), x.size());
    const size_t records = ecco_result_num_records(res.get());
    std::printf("status: %s\n", ecco_run_status_string(ecco_result_status(res.get())));
    if (*ecco_result_message(res.get())) {
        std::printf("message: %s\n", ecco_result_message(res.get()));
    }
    std::printf("iterations: %zu\n", records);
    std::printf("x:");
    for (double v : x) {
        std::printf(" %.17g", v);
    }
    std::printf("\n");
    if (records > 0) {
        ecco_iter_record last{};
        ecco_result_record(res.get(), records - 1, &last);
        std::printf("f: %.17g\ngrad_norm: %.17g\ngrad_evals: %llu\nhess_evals: %llu\n", last.f,
                    last.grad_norm, static_cast<unsigned long long>(last.grad_evals),
                    static_cast<unsigned long long>(last.hess_evals));
    }
    if (!trace_path.empty()) {
        if (ecco_status s = ecco_result_write_csv(res.get(), trace_path.c_str()); s != ECCO_OK) {
            return report_failure(s);
        }
    }
    return 0;
}
