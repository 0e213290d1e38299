#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ecco/core/solver.hpp"

namespace ecco {

struct ProblemSpec {
    std::string name = "rosenbrock";
    Index dim = 2;
    std::optional<Vector> init;  // default: first default init of the function
};

struct MethodSpec {
    std::string label;
    SolveConfig config;
};

struct PerturbationSpec {
    double epsilon_ball = 0.0;
    int samples = 10;
    std::uint64_t seed = 0;
};

struct ExperimentSpec {
    ProblemSpec problem;
    std::vector<MethodSpec> methods;
    std::filesystem::path output_dir = "ecco_out";
    int repetitions = 1;
    std::optional<PerturbationSpec> perturbation;

    void validate() const;
};

/// Builds a spec from JSON. Methods are either preset names ("ecco-approx-fe")
/// or objects {"label": ..., "preset": ..., <knob>: <value>, ...}; a top-level
/// "defaults" object is applied to every method before its own knobs.
[[nodiscard]] ExperimentSpec parse_experiment_spec(const nlohmann::json& j);

/// Reads a JSON spec file. ECCO_OUTPUT_DIR, when set, replaces output_dir.
[[nodiscard]] ExperimentSpec load_experiment_spec(const std::filesystem::path& path);

struct RunSummary {
    std::string label;
    int repetition = 0;
    Status status = Status::max_iters;
    double final_f = 0.0;
    double grad_norm = 0.0;
    int iterations = 0;
    std::uint64_t grad_evals = 0;
    std::uint64_t hess_evals = 0;
    double wall_ms = 0.0;
    Vector x_final;
    std::filesystem::path trace_file;
    std::string message;
};

struct ExperimentSummary {
    std::vector<RunSummary> runs;
    std::filesystem::path summary_file;
    std::filesystem::path plot_file;
};

/// Runs every (method, repetition), writing one trace CSV per run, summary.csv
/// and convergence.svg under output_dir. Run failures are recorded in the
/// summary; file-system failures throw IoError.
[[nodiscard]] ExperimentSummary run_experiment(const ExperimentSpec& spec);

struct SweepSample {
    std::string label;
    int sample = 0;
    std::vector<std::pair<std::string, double>> params;
    Status status = Status::max_iters;
    double final_f = 0.0;
    double grad_norm = 0.0;
    int iterations = 0;
};

struct SweepMethodSummary {
    std::string label;
    int samples = 0;
    int converged = 0;
    double convergence_rate = 0.0;
    double f_min = 0.0;
    double f_median = 0.0;
    double f_max = 0.0;
};

struct SweepSummary {
    std::vector<SweepSample> samples;
    std::vector<SweepMethodSummary> methods;
    std::filesystem::path samples_file;
};

/// Lower/upper operating bounds for one tunable hyperparameter.
struct HyperBound {
    std::string key;
    double lower = 0.0;
    double upper = 0.0;
};

[[nodiscard]] std::vector<HyperBound> hyperparameter_bounds(Method m);

/// Draws from U(max(center - eps/center, lower), min(center + eps/center, upper)).
[[nodiscard]] double sample_hyperparameter(double center, double epsilon_ball,
                                           const HyperBound& bound, std::mt19937_64& rng);

/// Perturbs each method's hyperparameters inside a normalized ball and reports
/// convergence rate and final-f spread per method.
[[nodiscard]] SweepSummary run_robustness_sweep(const ExperimentSpec& spec);

struct ScalingRow {
    Index n = 0;
    std::uint64_t approx_flops = 0;
    std::uint64_t hessian_flops = 0;
    double approx_ms = 0.0;
    double hessian_ms = 0.0;
};

struct ScalingTable {
    std::vector<ScalingRow> rows;
    std::optional<double> approx_exponent;   // fitted on flop counts
    std::optional<double> hessian_exponent;  // fitted on flop counts
    std::optional<double> approx_time_exponent;
    std::optional<double> hessian_time_exponent;
};

/// Least-squares slope of log(cost) on log(n); nullopt with fewer than two
/// distinct n values.
[[nodiscard]] std::optional<double> fit_exponent(const std::vector<double>& n,
                                                 const std::vector<double>& cost);

/// Measures the cost of one first-order and one dense full-Hessian control
/// evaluation on extended_wood(n) for each n.
[[nodiscard]] ScalingTable run_scaling_bench(const std::vector<Index>& n_values);

[[nodiscard]] nlohmann::json to_json(const ExperimentSummary& s);
[[nodiscard]] nlohmann::json to_json(const SweepSummary& s);
[[nodiscard]] nlohmann::json to_json(const ScalingTable& t);

}  // namespace ecco
