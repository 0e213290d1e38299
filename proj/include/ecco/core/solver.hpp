#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ecco/core/control.hpp"
#include "ecco/core/eatss.hpp"
#include "ecco/core/integrator.hpp"
#include "ecco/core/objective.hpp"

namespace ecco {

enum class IntegratorKind { fe, rk4, ab2 };
enum class Method { ecco, source_stepping, gd_armijo, adam };

/// Where each EATSS search starts.
///   circuit: passivity step on the first FE iteration (dt_default for
///            RK4/AB2), then the last accepted step.
///   last:    dt_default, then the last accepted step.
///   fixed:   dt_fixed every iteration.
enum class DtInit { circuit, last, fixed };

enum class Status { converged, max_iters, step_failure, evaluation_error };

struct HomotopyConfig {
    double dgamma = 0.1;
    std::optional<double> inner_epsilon;
    std::optional<int> inner_max_iters;
};

struct BaselineConfig {
    double lr = 0.01;
    double armijo_c = 1e-4;
    double backtrack = 0.5;
    int max_backtracks = 60;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_eps = 1e-8;
};

struct SolveConfig {
    Method method = Method::ecco;
    ControlSpec control;
    IntegratorKind integrator = IntegratorKind::fe;
    EatssConfig eatss;
    bool eatss_enabled = true;
    DtInit dt_init = DtInit::circuit;
    double dt_fixed = 1e-2;
    Rk4Weights rk4_weights = Rk4Weights::classical;
    double ab2_k1 = 1.5;
    double ab2_k2 = -0.5;
    double epsilon = 1e-4;   // |f_k - f_{k+1}| termination threshold
    double grad_tol = 0.0;   // optional ||grad||_inf termination; 0 disables
    int max_iters = 10000;
    std::optional<HomotopyConfig> homotopy;
    BaselineConfig baseline;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Secondary guard: ||grad||_2 below this ends a run as converged.
inline constexpr double kStationaryGradNorm = 1e-12;

struct IterRecord {
    int iter = 0;
    double t = 0.0;
    double dt = 0.0;
    double f = 0.0;
    double grad_norm = 0.0;
    double lyap = 0.0;
    double z_min = 1.0;
    double z_max = 1.0;
    int eatss_trials = 0;
    EvalCounts evals;
    double lte_max = 0.0;
    Vector x;  // iterate after the step
};

struct Trace {
    std::vector<IterRecord> records;
    Vector x_initial;
    Vector x_final;
    Status status = Status::max_iters;
    std::vector<std::pair<double, int>> homotopy_boundaries;  // (gamma, first iter of stage)
    std::string message;
};

[[nodiscard]] const char* to_string(Status s) noexcept;

/// Scaled gradient flow integrated with the configured control, integrator
/// and EATSS.
[[nodiscard]] Trace ecco_solve(const Objective& obj, const Vector& x0, const SolveConfig& cfg);

/// Source-stepping homotopy: stages gamma = 0, dgamma, 2 dgamma, ..., 1 on
/// f(x) - (1 - gamma) grad f(x0)^T x, each warm-started from the previous stage.
[[nodiscard]] Trace source_stepping_solve(const Objective& obj, const Vector& x0,
                                          const SolveConfig& cfg);

/// Gradient descent with Armijo backtracking from cfg.baseline.lr each iteration.
[[nodiscard]] Trace gd_armijo_solve(const Objective& obj, const Vector& x0, const SolveConfig& cfg);

/// Full-gradient Adam with bias correction.
[[nodiscard]] Trace adam_solve(const Objective& obj, const Vector& x0, const SolveConfig& cfg,
                               double lr, double beta1, double beta2);

/// Dispatches on cfg.method.
[[nodiscard]] Trace solve(const Objective& obj, const Vector& x0, const SolveConfig& cfg);

/// Textbook GD with step alpha against ECCO with identity control, FE and a
/// fixed step alpha. True iff all iterates agree to 1e-12 relative and, when
/// the recursion overflows, both sequences stop at the same step.
[[nodiscard]] bool equivalence_gd(const Objective& obj, const Vector& x0, double alpha, int n_steps);

/// Heavy-ball recursion against the AB2 step with dt k1 = alpha, k2 = beta and
/// the previous slope replaced by the backward difference of the iterates.
/// True iff iterates agree to 1e-10.
[[nodiscard]] bool equivalence_heavy_ball(const Objective& obj, const Vector& x0, double alpha,
                                          double beta, int n_steps);

}  // namespace ecco
