#include "ecco/core/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <set>
#include <sstream>
#include <thread>

#include "ecco/core/control.hpp"
#include "ecco/core/errors.hpp"
#include "ecco/core/options.hpp"
#include "ecco/core/report.hpp"
#include "ecco/core/test_functions.hpp"

namespace ecco {

namespace {

using json = nlohmann::json;

std::string knob_text(const json& v) {
    if (v.is_string()) {
        return v.get<std::string>();
    }
    if (v.is_boolean()) {
        return v.get<bool>() ? "true" : "false";
    }
    if (v.is_number_integer()) {
        return std::to_string(v.get<long long>());
    }
    if (v.is_number()) {
        return format_real(v.get<double>());
    }
    throw UsageError("knob values must be strings, numbers or booleans");
}

void apply_knobs(SolveConfig& cfg, const json& obj, const std::set<std::string>& skip) {
    for (const auto& [key, value] : obj.items()) {
        if (skip.count(key)) {
            continue;
        }
        apply_option(cfg, key, knob_text(value));
    }
}

std::string safe_name(const std::string& label) {
    std::string out = label;
    for (char& ch : out) {
        const bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') ||
                        (ch >= '0' && ch <= '9') || ch == '-' || ch == '_' || ch == '.';
        if (!ok) {
            ch = '_';
        }
    }
    return out;
}

// Runs tasks on a small worker pool; results are collected by index so the
// caller writes files in a fixed order.
void run_parallel(std::size_t count, const std::function<void(std::size_t)>& task) {
    const std::size_t workers =
        std::max<std::size_t>(1, std::min<std::size_t>(count, std::thread::hardware_concurrency()));
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            task(i);
        }
    };
    if (workers <= 1) {
        worker();
        return;
    }
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back(worker);
    }
}

struct Problem {
    TestFunction fn;
    Vector init;
};

Problem build_problem(const ProblemSpec& p) {
    TestFunction fn = make_test_function(p.name, p.dim);
    Vector init = p.init ? *p.init : fn.spec.default_inits.front();
    if (init.size() != fn.spec.dim) {
        throw UsageError("initial point dimension does not match the problem");
    }
    return {std::move(fn), std::move(init)};
}

struct RunOutput {
    Trace trace;
    double wall_ms = 0.0;
    std::string error;
};

RunOutput run_one(const Objective& obj, const Vector& x0, const SolveConfig& cfg) {
    RunOutput out;
    const auto start = std::chrono::steady_clock::now();
    try {
        out.trace = solve(obj, x0, cfg);
    } catch (const std::exception& e) {
        out.trace.x_initial = x0;
        out.trace.x_final = x0;
        out.trace.status = Status::evaluation_error;
        out.trace.message = e.what();
        out.error = e.what();
    }
    out.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                      .count();
    return out;
}

std::string join_vector(const Vector& v) {
    std::string s;
    for (Index i = 0; i < v.size(); ++i) {
        s += (i ? " " : "") + format_real(v[i]);
    }
    return s;
}

json vector_json(const Vector& v) {
    json a = json::array();
    for (Index i = 0; i < v.size(); ++i) {
        a.push_back(v[i]);
    }
    return a;
}

double final_f(const Objective& obj, const Trace& tr) {
    if (!tr.records.empty()) {
        return tr.records.back().f;
    }
    try {
        return obj.value(tr.x_final);
    } catch (const Error&) {
        return std::numeric_limits<double>::quiet_NaN();
    }
}

double final_grad_norm(const Objective& obj, const Trace& tr) {
    if (!tr.records.empty()) {
        return tr.records.back().grad_norm;
    }
    try {
        return obj.gradient(tr.x_final).norm();
    } catch (const Error&) {
        return std::numeric_limits<double>::quiet_NaN();
    }
}

double param_value(const SolveConfig& cfg, const std::string& key) {
    if (key == "eta") return cfg.eatss.eta;
    if (key == "delta") return cfg.control.delta;
    if (key == "alpha") return cfg.eatss.alpha;
    if (key == "beta") return cfg.eatss.beta;
    if (key == "armijo_c") return cfg.method == Method::gd_armijo ? cfg.baseline.armijo_c : cfg.eatss.c;
    if (key == "lr") return cfg.baseline.lr;
    if (key == "beta1") return cfg.baseline.beta1;
    if (key == "beta2") return cfg.baseline.beta2;
    throw UsageError("unknown hyperparameter " + key);
}

}  // namespace

void ExperimentSpec::validate() const {
    std::set<std::string> labels;
    for (const MethodSpec& m : methods) {
        if (m.label.empty()) {
            throw UsageError("method labels must be non-empty");
        }
        if (!labels.insert(m.label).second) {
            throw UsageError("duplicate method label '" + m.label + "'");
        }
        m.config.validate();
    }
    if (repetitions < 1) {
        throw UsageError("repetitions must be positive");
    }
    if (perturbation) {
        if (!(perturbation->epsilon_ball >= 0.0)) {
            throw UsageError("epsilon_ball must be non-negative");
        }
        if (perturbation->samples < 1) {
            throw UsageError("perturbation samples must be positive");
        }
    }
}

ExperimentSpec parse_experiment_spec(const json& j) {
    if (!j.is_object()) {
        throw UsageError("experiment spec must be a JSON object");
    }
    ExperimentSpec spec;
    try {
        if (j.contains("problem")) {
            const json& p = j.at("problem");
            if (p.is_string()) {
                spec.problem.name = p.get<std::string>();
                spec.problem.dim = default_dim(spec.problem.name);
            } else {
                spec.problem.name = p.at("name").get<std::string>();
                spec.problem.dim = p.contains("dim") ? p.at("dim").get<Index>()
                                                     : default_dim(spec.problem.name);
                if (p.contains("init")) {
                    const auto v = p.at("init").get<std::vector<double>>();
                    spec.problem.init = Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size()));
                }
            }
        }
        SolveConfig defaults;
        const json* default_knobs = j.contains("defaults") ? &j.at("defaults") : nullptr;
        if (j.contains("methods")) {
            for (const json& m : j.at("methods")) {
                MethodSpec ms;
                if (m.is_string()) {
                    ms.label = m.get<std::string>();
                    ms.config = preset_config(ms.label);
                    if (default_knobs) {
                        apply_knobs(ms.config, *default_knobs, {});
                    }
                } else {
                    const std::string preset = m.value("preset", std::string{});
                    ms.config = preset.empty() ? defaults : preset_config(preset);
                    if (default_knobs) {
                        apply_knobs(ms.config, *default_knobs, {});
                    }
                    apply_knobs(ms.config, m, {"label", "preset"});
                    ms.label = m.value("label", preset.empty() ? std::string(to_string(ms.config.method))
                                                               : preset);
                }
                spec.methods.push_back(std::move(ms));
            }
        }
        if (j.contains("output_dir")) {
            spec.output_dir = j.at("output_dir").get<std::string>();
        }
        if (j.contains("repetitions")) {
            spec.repetitions = j.at("repetitions").get<int>();
        }
        if (j.contains("perturbation") && !j.at("perturbation").is_null()) {
            const json& p = j.at("perturbation");
            PerturbationSpec ps;
            ps.epsilon_ball = p.value("epsilon_ball", 0.0);
            ps.samples = p.value("samples", 10);
            ps.seed = p.value("seed", std::uint64_t{0});
            spec.perturbation = ps;
        }
    } catch (const json::exception& e) {
        throw UsageError(std::string("malformed experiment spec: ") + e.what());
    }
    spec.validate();
    return spec;
}

ExperimentSpec load_experiment_spec(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) {
        throw IoError("cannot read " + path.string());
    }
    json j;
    try {
        j = json::parse(is);
    } catch (const json::exception& e) {
        throw UsageError(path.string() + ": " + e.what());
    }
    ExperimentSpec spec = parse_experiment_spec(j);
    if (const char* env = std::getenv("ECCO_OUTPUT_DIR"); env && *env) {
        spec.output_dir = env;
    }
    return spec;
}

ExperimentSummary run_experiment(const ExperimentSpec& spec) {
    spec.validate();
    const Problem problem = build_problem(spec.problem);
    const Objective& obj = problem.fn.objective;

    struct Job {
        std::size_t method;
        int rep;
    };
    std::vector<Job> jobs;
    for (std::size_t m = 0; m < spec.methods.size(); ++m) {
        for (int r = 0; r < spec.repetitions; ++r) {
            jobs.push_back({m, r});
        }
    }
    std::vector<RunOutput> outputs(jobs.size());
    run_parallel(jobs.size(), [&](std::size_t i) {
        outputs[i] = run_one(obj, problem.init, spec.methods[jobs[i].method].config);
    });

    ExperimentSummary summary;
    std::string table = "label,repetition,status,final_f,grad_norm,iterations,grad_evals,hess_evals,x_final\n";
    std::vector<LabeledTrace> plotted;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        const MethodSpec& ms = spec.methods[jobs[i].method];
        const Trace& tr = outputs[i].trace;
        RunSummary rs;
        rs.label = ms.label;
        rs.repetition = jobs[i].rep;
        rs.status = tr.status;
        rs.final_f = final_f(obj, tr);
        rs.grad_norm = final_grad_norm(obj, tr);
        rs.iterations = static_cast<int>(tr.records.size());
        if (!tr.records.empty()) {
            rs.grad_evals = tr.records.back().evals.grad;
            rs.hess_evals = tr.records.back().evals.hess;
        }
        rs.wall_ms = outputs[i].wall_ms;
        rs.x_final = tr.x_final;
        rs.message = tr.message;
        rs.trace_file = spec.output_dir /
                        ("trace_" + safe_name(ms.label) + "_rep" + std::to_string(jobs[i].rep) + ".csv");
        emit_trace_csv(tr, rs.trace_file);

        table += ms.label + ',' + std::to_string(rs.repetition) + ',' + to_string(rs.status) + ',' +
                 format_real(rs.final_f) + ',' + format_real(rs.grad_norm) + ',' +
                 std::to_string(rs.iterations) + ',' + std::to_string(rs.grad_evals) + ',' +
                 std::to_string(rs.hess_evals) + ',' + join_vector(rs.x_final) + '\n';
        if (jobs[i].rep == 0) {
            plotted.emplace_back(ms.label, tr);
        }
        summary.runs.push_back(std::move(rs));
    }
    summary.summary_file = spec.output_dir / "summary.csv";
    write_text_file(summary.summary_file, table);
    if (!plotted.empty()) {
        summary.plot_file = spec.output_dir / "convergence.svg";
        emit_convergence_svg(plotted, summary.plot_file);
    }
    return summary;
}

std::vector<HyperBound> hyperparameter_bounds(Method m) {
    switch (m) {
        case Method::ecco:
        case Method::source_stepping:
            return {{"eta", 1e-4, 10.0},
                    {"delta", 1e-3, 1e3},
                    {"alpha", 1e-3, 0.999},
                    {"beta", 1.001, 4.0},
                    {"armijo_c", 0.0, 0.499}};
        case Method::gd_armijo:
            return {{"lr", 1e-4, 10.0}, {"armijo_c", 0.0, 0.499}};
        case Method::adam:
            return {{"lr", 1e-4, 10.0}, {"beta1", 0.7, 0.999}, {"beta2", 0.7, 0.9999}};
    }
    return {};
}

double sample_hyperparameter(double center, double epsilon_ball, const HyperBound& bound,
                             std::mt19937_64& rng) {
    if (epsilon_ball == 0.0) {
        return std::clamp(center, bound.lower, bound.upper);
    }
    const double radius = center != 0.0 ? epsilon_ball / std::abs(center)
                                        : std::numeric_limits<double>::infinity();
    const double lo = std::max(center - radius, bound.lower);
    const double hi = std::min(center + radius, bound.upper);
    if (!(hi > lo)) {
        return lo;
    }
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

SweepSummary run_robustness_sweep(const ExperimentSpec& spec) {
    spec.validate();
    if (!spec.perturbation) {
        throw UsageError("robustness sweep requires a perturbation block");
    }
    const PerturbationSpec& pert = *spec.perturbation;
    const Problem problem = build_problem(spec.problem);
    const Objective& obj = problem.fn.objective;

    struct Job {
        std::size_t method;
        int sample;
        SolveConfig cfg;
        std::vector<std::pair<std::string, double>> params;
    };
    std::vector<Job> jobs;
    for (std::size_t m = 0; m < spec.methods.size(); ++m) {
        const SolveConfig& base = spec.methods[m].config;
        for (int s = 0; s < pert.samples; ++s) {
            std::seed_seq seq{static_cast<std::uint32_t>(pert.seed),
                              static_cast<std::uint32_t>(pert.seed >> 32),
                              static_cast<std::uint32_t>(m), static_cast<std::uint32_t>(s)};
            std::mt19937_64 rng(seq);
            Job job{m, s, base, {}};
            for (const HyperBound& b : hyperparameter_bounds(base.method)) {
                const double v = sample_hyperparameter(param_value(base, b.key), pert.epsilon_ball, b, rng);
                if (b.key == "armijo_c" && base.method == Method::gd_armijo) {
                    job.cfg.baseline.armijo_c = v;
                } else {
                    apply_option(job.cfg, b.key, format_real(v));
                }
                job.params.emplace_back(b.key, v);
            }
            jobs.push_back(std::move(job));
        }
    }

    std::vector<RunOutput> outputs(jobs.size());
    run_parallel(jobs.size(), [&](std::size_t i) {
        outputs[i] = run_one(obj, problem.init, jobs[i].cfg);
    });

    SweepSummary summary;
    std::string table = "label,sample,params,status,final_f,grad_norm,iterations\n";
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        const Trace& tr = outputs[i].trace;
        SweepSample s;
        s.label = spec.methods[jobs[i].method].label;
        s.sample = jobs[i].sample;
        s.params = jobs[i].params;
        s.status = tr.status;
        s.final_f = final_f(obj, tr);
        s.grad_norm = final_grad_norm(obj, tr);
        s.iterations = static_cast<int>(tr.records.size());
        std::string params;
        for (const auto& [k, v] : s.params) {
            params += (params.empty() ? "" : " ") + k + '=' + format_real(v);
        }
        table += s.label + ',' + std::to_string(s.sample) + ',' + params + ',' + to_string(s.status) +
                 ',' + format_real(s.final_f) + ',' + format_real(s.grad_norm) + ',' +
                 std::to_string(s.iterations) + '\n';
        summary.samples.push_back(std::move(s));
    }

    std::string agg = "label,samples,converged,convergence_rate,f_min,f_median,f_max\n";
    for (const MethodSpec& ms : spec.methods) {
        SweepMethodSummary ag;
        ag.label = ms.label;
        std::vector<double> fs;
        for (const SweepSample& s : summary.samples) {
            if (s.label != ms.label) {
                continue;
            }
            ++ag.samples;
            if (s.status == Status::converged) {
                ++ag.converged;
            }
            if (std::isfinite(s.final_f)) {
                fs.push_back(s.final_f);
            }
        }
        ag.convergence_rate = ag.samples ? static_cast<double>(ag.converged) / ag.samples : 0.0;
        if (!fs.empty()) {
            std::sort(fs.begin(), fs.end());
            ag.f_min = fs.front();
            ag.f_max = fs.back();
            const std::size_t mid = fs.size() / 2;
            ag.f_median = fs.size() % 2 ? fs[mid] : 0.5 * (fs[mid - 1] + fs[mid]);
        } else {
            ag.f_min = ag.f_median = ag.f_max = std::numeric_limits<double>::quiet_NaN();
        }
        agg += ag.label + ',' + std::to_string(ag.samples) + ',' + std::to_string(ag.converged) + ',' +
               format_real(ag.convergence_rate) + ',' + format_real(ag.f_min) + ',' +
               format_real(ag.f_median) + ',' + format_real(ag.f_max) + '\n';
        summary.methods.push_back(std::move(ag));
    }
    summary.samples_file = spec.output_dir / "sweep_samples.csv";
    write_text_file(summary.samples_file, table);
    write_text_file(spec.output_dir / "sweep_summary.csv", agg);
    return summary;
}

std::optional<double> fit_exponent(const std::vector<double>& n, const std::vector<double>& cost) {
    if (n.size() != cost.size()) {
        throw UsageError("fit_exponent needs equally sized inputs");
    }
    std::set<double> distinct(n.begin(), n.end());
    if (distinct.size() < 2) {
        return std::nullopt;
    }
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double m = static_cast<double>(n.size());
    for (std::size_t i = 0; i < n.size(); ++i) {
        if (!(n[i] > 0.0) || !(cost[i] > 0.0)) {
            return std::nullopt;
        }
        const double lx = std::log(n[i]);
        const double ly = std::log(cost[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

ScalingTable run_scaling_bench(const std::vector<Index>& n_values) {
    ScalingTable table;
    ControlSpec spec;
    spec.normalize = true;
    for (const Index n : n_values) {
        const TestFunction fn = make_test_function("extended_wood", n);
        Vector x(n);
        for (Index i = 0; i < n; ++i) {
            x[i] = 1.5 + 0.25 * std::sin(static_cast<double>(i));
        }
        const Vector g = fn.objective.gradient(x);
        const Matrix h = fn.objective.hessian(x);
        ControlState state;
        state.anchor = GradientAnchor{fn.objective.gradient(x + Vector::Constant(n, 1e-3)), 0.1};

        ScalingRow row;
        row.n = n;
        FlopCounter fa;
        FlopCounter fh;
        spec.kind = ControlKind::approximate;
        const auto t0 = std::chrono::steady_clock::now();
        const ZDiag za = z_approximate(g, state, spec, &fa);
        const auto t1 = std::chrono::steady_clock::now();
        spec.kind = ControlKind::full_hessian;
        const ZDiag zh = z_full_hessian(g, h, spec, &fh);
        const auto t2 = std::chrono::steady_clock::now();
        row.approx_flops = fa.flops;
        row.hessian_flops = fh.flops;
        row.approx_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
        row.hessian_ms = std::chrono::duration<double, std::milli>(t2 - t1).count();
        (void)za;
        (void)zh;
        table.rows.push_back(row);
    }
    std::vector<double> ns, ca, ch, ta, th;
    for (const ScalingRow& r : table.rows) {
        ns.push_back(static_cast<double>(r.n));
        ca.push_back(static_cast<double>(r.approx_flops));
        ch.push_back(static_cast<double>(r.hessian_flops));
        ta.push_back(r.approx_ms);
        th.push_back(r.hessian_ms);
    }
    table.approx_exponent = fit_exponent(ns, ca);
    table.hessian_exponent = fit_exponent(ns, ch);
    table.approx_time_exponent = fit_exponent(ns, ta);
    table.hessian_time_exponent = fit_exponent(ns, th);
    return table;
}

json to_json(const ExperimentSummary& s) {
    json runs = json::array();
    for (const RunSummary& r : s.runs) {
        runs.push_back({{"label", r.label},
                        {"repetition", r.repetition},
                        {"status", to_string(r.status)},
                        {"final_f", r.final_f},
                        {"grad_norm", r.grad_norm},
                        {"iterations", r.iterations},
                        {"grad_evals", r.grad_evals},
                        {"hess_evals", r.hess_evals},
                        {"wall_ms", r.wall_ms},
                        {"x_final", vector_json(r.x_final)},
                        {"trace_file", r.trace_file.string()},
                        {"message", r.message}});
    }
    return {{"runs", runs},
            {"summary_file", s.summary_file.string()},
            {"plot_file", s.plot_file.string()}};
}

json to_json(const SweepSummary& s) {
    json methods = json::array();
    for (const SweepMethodSummary& m : s.methods) {
        methods.push_back({{"label", m.label},
                           {"samples", m.samples},
                           {"converged", m.converged},
                           {"convergence_rate", m.convergence_rate},
                           {"f_min", m.f_min},
                           {"f_median", m.f_median},
                           {"f_max", m.f_max}});
    }
    return {{"methods", methods}, {"samples_file", s.samples_file.string()}};
}

json to_json(const ScalingTable& t) {
    json rows = json::array();
    for (const ScalingRow& r : t.rows) {
        rows.push_back({{"n", r.n},
                        {"approx_flops", r.approx_flops},
                        {"hessian_flops", r.hessian_flops},
                        {"approx_ms", r.approx_ms},
                        {"hessian_ms", r.hessian_ms}});
    }
    const auto opt = [](const std::optional<double>& v) -> json { return v ? json(*v) : json("n/a"); };
    return {{"rows", rows},
            {"approx_exponent", opt(t.approx_exponent)},
            {"hessian_exponent", opt(t.hessian_exponent)},
            {"approx_time_exponent", opt(t.approx_time_exponent)},
            {"hessian_time_exponent", opt(t.hessian_time_exponent)}};
}

}  // namespace ecco
